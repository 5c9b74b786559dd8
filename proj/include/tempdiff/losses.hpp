#pragma once

#include <array>
#include <vector>

namespace tempdiff {

// The four entailment probabilities ranked by the margin loss:
//   p_g  = p(ent | AS + C, gold direction)
//   p_og = p(ent | C,      gold direction)
//   p_w  = p(ent | AS + C, opposite direction)
//   p_ow = p(ent | C,      opposite direction)
struct RankQuadruple {
    double p_g = 0.0;
    double p_og = 0.0;
    double p_w = 0.0;
    double p_ow = 0.0;

    void validate() const;
};

// Margin ranking loss:
//   max(0, eps + p_og - p_g) + max(0, eps + p_w - p_ow)
double mr_loss(const RankQuadruple& q, double epsilon);

// Partial derivatives of mr_loss w.r.t. (p_g, p_og, p_w, p_ow).
std::array<double, 4> mr_loss_grad(const RankQuadruple& q, double epsilon);

// Aggregated objective: alpha * ce + mr.
double joint_loss(double ce, double mr, double alpha);

// Mean over the batch of the summed token-level negative log-likelihood of
// each target sequence. outputs[i][t] is the model's distribution over the
// vocabulary at position t; target_ids[i][t] selects the gold token.
double ce_loss(const std::vector<std::vector<std::vector<double>>>& outputs,
               const std::vector<std::vector<int>>& target_ids);

// Pairwise softmax NLL of the positive explanation:
//   -log( e^{p_pos} / (e^{p_pos} + e^{p_neg}) )
double explanation_pair_loss(double p_pos, double p_neg);

// d(loss)/d(p_pos), d(loss)/d(p_neg) for explanation_pair_loss.
std::array<double, 2> explanation_pair_loss_grad(double p_pos, double p_neg);

}  // namespace tempdiff
