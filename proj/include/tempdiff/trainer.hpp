#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tempdiff/instance.hpp"
#include "tempdiff/losses.hpp"
#include "tempdiff/scorer.hpp"

namespace tempdiff {

struct TrainConfig {
    double epsilon = 0.1;  // margin in the ranking loss
    double alpha = 10.0;   // cross-entropy weight in the aggregated loss
    int steps = 50;
    int batch_size = 8;
    // Fraction of each batch drawn from relative-label instances; when
    // unset, mixes proportionally to corpus sizes.
    std::optional<double> mix_ratio;
    double learning_rate = 0.02;
    uint64_t seed = 0;

    void validate() const;
};

struct TrainResult {
    std::vector<double> losses;  // one entry per step

    double initial_loss() const { return losses.front(); }
    double final_loss() const { return losses.back(); }
};

// One explanation-verifier training pair: a human-annotated instance and a
// mined negative explanation for the same additional sentence.
struct ExplanationPair {
    DiffInstance positive;
    std::string negative_explanation;

    void validate() const;
};

// Joint loop over hard and relative supervision. Hard instances contribute
// cross-entropy on their two rendered targets; relative instances
// contribute the margin ranking loss over their four scoring variants.
// Trainable backends get one optimizer update per step; the loop is a pure
// scoring pass otherwise.
TrainResult train(const std::vector<HardInstance>& hard,
                  const std::vector<DiffInstance>& diff,
                  const TrainConfig& cfg, Backend& backend);

// Pairwise training of the explanation verifier: pushes the entailment
// probability of the human explanation above the mined negative's.
TrainResult train_explanation_verifier(const std::vector<ExplanationPair>& pairs,
                                       const TrainConfig& cfg, Backend& backend);

// Checkpoint directory layout: weights.bin (trainable backends),
// train_config snapshot, loss_trace.txt.
void write_checkpoint(const std::string& dir, const TrainConfig& cfg,
                      const TrainResult& result, const Backend& backend);

// Opens the backend stored in a checkpoint directory: weights.bin for
// seq2seq models, mock.jsonl for lookup-table backends.
std::unique_ptr<Backend> load_checkpoint(const std::string& dir);

// All premises, hypotheses, and targets a training run will render; used
// to build a fresh backend's vocabulary.
std::vector<std::string> collect_texts(const std::vector<HardInstance>& hard,
                                       const std::vector<DiffInstance>& diff);

}  // namespace tempdiff
