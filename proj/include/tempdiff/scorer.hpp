#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tempdiff/entailment.hpp"

namespace tempdiff {

// Normalized entailment/contradiction probability pair.
struct ScorerOutput {
    double p_ent = 0.5;
    double p_con = 0.5;

    void validate() const;
};

enum class BackendKind { mock, seq2seq };

struct BackendConfig {
    BackendKind kind = BackendKind::mock;
    // Checkpoint/preset name for seq2seq, lookup-table path for mock.
    std::string model;
    int max_input_length = 256;  // tokens
    int batch_size = 8;
    std::string device = "cpu";

    void validate() const;
};

// Scoring backend. Implementations must be deterministic for fixed state.
class Backend {
public:
    virtual ~Backend() = default;

    virtual ScorerOutput score(const EntailmentExample& example) = 0;

    // Order-preserving, element-wise equal to score().
    virtual std::vector<ScorerOutput> batch_score(
        const std::vector<EntailmentExample>& examples);

    // Inputs longer than the configured maximum are truncated, never fatal.
    size_t truncation_count() const { return truncations_; }

protected:
    size_t truncations_ = 0;
};

// Lookup-table backend keyed by (premise, hypothesis); unknown keys score
// (0.5, 0.5). Safe for unrestricted concurrent reads once built.
class MockBackend : public Backend {
public:
    MockBackend() = default;

    // Table rows in the record format: premise, hypothesis, p_ent.
    static std::unique_ptr<MockBackend> from_file(const std::string& path);

    void set_score(const std::string& premise, const std::string& hypothesis,
                   double p_ent);

    ScorerOutput score(const EntailmentExample& example) override;

private:
    std::unordered_map<std::string, double> table_;
};

std::string mock_table_key(const std::string& premise,
                           const std::string& hypothesis);

// Log-likelihoods of the two rendered target sequences for one example,
// plus a handle for backpropagation on trainable backends.
struct PairScore {
    double logp_pos = 0.0;
    double logp_neg = 0.0;
    long tape = -1;

    // Renormalizes over exactly the two target strings.
    ScorerOutput output() const;
};

// Backend whose parameters can be updated by gradient descent. Gradients
// are accumulated per tape and applied by step(); one in-flight batch per
// replica.
class TrainableBackend : public Backend {
public:
    // keep_tape retains activations for a later backward() call.
    virtual PairScore score_pair(const EntailmentExample& example,
                                 bool keep_tape) = 0;

    // Adds d(loss)/d(logp) contributions for the two target sequences.
    virtual void backward(long tape, double dl_dlogp_pos,
                          double dl_dlogp_neg) = 0;

    // Clears accumulated gradients and retained tapes.
    virtual void zero_grad() = 0;

    // One optimizer update from the accumulated gradients.
    virtual void step(double learning_rate) = 0;

    virtual void save(const std::string& path) const = 0;
};

// Constructs the backend named by the config. Seq2seq configs expect
// `model` to name a checkpoint file or a size preset.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

}  // namespace tempdiff
