#include "tempdiff/losses.hpp"

#include <algorithm>
#include <cmath>

#include "tempdiff/error.hpp"

namespace tempdiff {

void RankQuadruple::validate() const {
    for (double p : {p_g, p_og, p_w, p_ow}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError("rank probability out of [0,1]: " +
                                  std::to_string(p));
        }
    }
}

double mr_loss(const RankQuadruple& q, double epsilon) {
    return std::max(0.0, epsilon + q.p_og - q.p_g) +
           std::max(0.0, epsilon + q.p_w - q.p_ow);
}

std::array<double, 4> mr_loss_grad(const RankQuadruple& q, double epsilon) {
    std::array<double, 4> grad{0.0, 0.0, 0.0, 0.0};
    if (epsilon + q.p_og - q.p_g > 0.0) {
        grad[0] = -1.0;  // d/dp_g
        grad[1] = 1.0;   // d/dp_og
    }
    if (epsilon + q.p_w - q.p_ow > 0.0) {
        grad[2] = 1.0;   // d/dp_w
        grad[3] = -1.0;  // d/dp_ow
    }
    return grad;
}

double joint_loss(double ce, double mr, double alpha) {
    if (ce < 0.0 || mr < 0.0) {
        throw ValidationError("loss terms must be non-negative");
    }
    return alpha * ce + mr;
}

double ce_loss(const std::vector<std::vector<std::vector<double>>>& outputs,
               const std::vector<std::vector<int>>& target_ids) {
    if (outputs.size() != target_ids.size()) {
        throw ValidationError("one target per output required");
    }
    if (outputs.empty()) return 0.0;
    double total = 0.0;
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].size() != target_ids[i].size()) {
            throw ValidationError("output/target length mismatch at example " +
                                  std::to_string(i));
        }
        for (size_t t = 0; t < outputs[i].size(); ++t) {
            int y = target_ids[i][t];
            if (y < 0 || static_cast<size_t>(y) >= outputs[i][t].size()) {
                throw ValidationError("target id out of vocabulary range");
            }
            total -= std::log(outputs[i][t][static_cast<size_t>(y)]);
        }
    }
    return total / static_cast<double>(outputs.size());
}

double explanation_pair_loss(double p_pos, double p_neg) {
    // -log softmax = log(1 + e^{p_neg - p_pos})
    return std::log1p(std::exp(p_neg - p_pos));
}

std::array<double, 2> explanation_pair_loss_grad(double p_pos, double p_neg) {
    double s = 1.0 / (1.0 + std::exp(p_pos - p_neg));  // sigmoid(p_neg - p_pos)
    return {-s, s};
}

}  // namespace tempdiff
