#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tempdiff/scorer.hpp"

namespace tempdiff {

// Word-level vocabulary with fixed special tokens.
class Vocab {
public:
    static constexpr int kUnk = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kSep = 3;

    Vocab();

    int add(const std::string& token);
    int id(const std::string& token) const;  // kUnk for unknown tokens
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

// Compact encoder-decoder language model: tanh RNN over the input tokens,
// tanh RNN decoder seeded with the final encoder state, softmax output
// layer. Scores target strings by teacher-forced sequence likelihood.
// All math in double precision; fully deterministic given the seed.
class Seq2SeqModel {
public:
    struct Gradients;
    struct Tape;

    Seq2SeqModel(int hidden_dim, int max_input_length);
    ~Seq2SeqModel();

    // Builds the vocabulary from raw texts and randomly initializes the
    // parameters. Callable once per model.
    void initialize(const std::vector<std::string>& texts, uint64_t seed);

    bool initialized() const { return initialized_; }
    int hidden_dim() const { return hidden_; }
    int max_input_length() const { return max_input_length_; }
    const Vocab& vocab() const { return vocab_; }
    size_t parameter_count() const;

    // Input rendering: premise tokens, <sep>, hypothesis tokens. Inputs
    // over the length limit keep their tail (the hypothesis end).
    std::vector<int> encode_input(const std::string& premise,
                                  const std::string& hypothesis,
                                  bool* truncated = nullptr) const;
    std::vector<int> encode_target(const std::string& target) const;

    // Log-likelihood of the target ids; fills tape when given.
    double sequence_logprob(const std::vector<int>& input_ids,
                            const std::vector<int>& target_ids,
                            Tape* tape = nullptr) const;

    // Per-position output distributions under teacher forcing, one
    // vocabulary-sized row per target token.
    std::vector<std::vector<double>> token_distributions(
        const std::vector<int>& input_ids,
        const std::vector<int>& target_ids) const;

    void backward(const Tape& tape, double dl_dlogp, Gradients& grads) const;

    Gradients make_gradients() const;
    void adam_step(Gradients& grads, double learning_rate);

    void save(const std::string& path) const;
    static std::unique_ptr<Seq2SeqModel> load(const std::string& path);

    // Finite-difference support: flat parameter view in a fixed order.
    size_t flat_size() const;
    double get_flat(size_t i) const;
    void set_flat(size_t i, double v);
    double grad_flat(const Gradients& grads, size_t i) const;

private:
    struct Params {
        Eigen::MatrixXd embed;      // V x d
        Eigen::MatrixXd enc_wx, enc_wh;
        Eigen::VectorXd enc_b;
        Eigen::MatrixXd dec_wx, dec_wh;
        Eigen::VectorXd dec_b;
        Eigen::MatrixXd out_w;      // V x d
        Eigen::VectorXd out_b;      // V
    };

    struct Span {
        double* data;
        size_t size;
    };

    void allocate(int vocab_size);
    static std::vector<Span> param_spans(Params& params);

    int hidden_;
    int max_input_length_;
    bool initialized_ = false;
    Vocab vocab_;
    Params p_;

    struct AdamState;
    std::unique_ptr<AdamState> adam_;
};

struct Seq2SeqModel::Gradients {
    Params g;
};

struct Seq2SeqModel::Tape {
    std::vector<int> input_ids;
    std::vector<int> target_ids;
    std::vector<Eigen::VectorXd> enc_h;   // per input position
    std::vector<Eigen::VectorXd> dec_s;   // per target position
    std::vector<Eigen::VectorXd> probs;   // softmax at each decode step
    double logprob = 0.0;
};

// Backend adapter: scores entailment examples by the renormalized
// likelihoods of the two rendered targets and exposes the training hooks.
class Seq2SeqBackend : public TrainableBackend {
public:
    // Fresh model from a size preset ("tiny", "small", "base").
    static std::unique_ptr<Seq2SeqBackend> fresh(const std::string& preset,
                                                 int max_input_length = 256);

    // Loads a checkpoint, or creates a fresh preset model when `model`
    // names a preset instead of a file.
    static std::unique_ptr<Seq2SeqBackend> open(const BackendConfig& config);

    explicit Seq2SeqBackend(std::unique_ptr<Seq2SeqModel> model);

    Seq2SeqModel& model() { return *model_; }
    const Seq2SeqModel& model() const { return *model_; }

    bool initialized() const { return model_->initialized(); }
    void initialize(const std::vector<std::string>& texts, uint64_t seed);

    ScorerOutput score(const EntailmentExample& example) override;
    PairScore score_pair(const EntailmentExample& example,
                         bool keep_tape) override;
    void backward(long tape, double dl_dlogp_pos, double dl_dlogp_neg) override;
    void zero_grad() override;
    void step(double learning_rate) override;
    void save(const std::string& path) const override;

private:
    struct TapePair {
        Seq2SeqModel::Tape pos;
        Seq2SeqModel::Tape neg;
    };

    std::unique_ptr<Seq2SeqModel> model_;
    std::unique_ptr<Seq2SeqModel::Gradients> grads_;
    std::vector<TapePair> tapes_;
};

}  // namespace tempdiff
