#include "tempdiff/seq2seq.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "tempdiff/error.hpp"
#include "tempdiff/text.hpp"

namespace tempdiff {

Vocab::Vocab() {
    for (const char* tok : {"<unk>", "<bos>", "<eos>", "<sep>"}) add(tok);
}

int Vocab::add(const std::string& token) {
    auto [it, inserted] = index_.emplace(token, static_cast<int>(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
    return tokens_.at(static_cast<size_t>(id));
}

struct Seq2SeqModel::AdamState {
    Params m;
    Params v;
    long t = 0;
};

Seq2SeqModel::Seq2SeqModel(int hidden_dim, int max_input_length)
    : hidden_(hidden_dim), max_input_length_(max_input_length) {
    if (hidden_dim < 4) throw Error("hidden_dim must be >= 4");
    if (max_input_length < 16) throw Error("max_input_length must be >= 16");
}

Seq2SeqModel::~Seq2SeqModel() = default;

void Seq2SeqModel::allocate(int vocab_size) {
    p_.embed = Eigen::MatrixXd::Zero(vocab_size, hidden_);
    p_.enc_wx = Eigen::MatrixXd::Zero(hidden_, hidden_);
    p_.enc_wh = Eigen::MatrixXd::Zero(hidden_, hidden_);
    p_.enc_b = Eigen::VectorXd::Zero(hidden_);
    p_.dec_wx = Eigen::MatrixXd::Zero(hidden_, hidden_);
    p_.dec_wh = Eigen::MatrixXd::Zero(hidden_, hidden_);
    p_.dec_b = Eigen::VectorXd::Zero(hidden_);
    p_.out_w = Eigen::MatrixXd::Zero(vocab_size, hidden_);
    p_.out_b = Eigen::VectorXd::Zero(vocab_size);
}

std::vector<Seq2SeqModel::Span> Seq2SeqModel::param_spans(Params& params) {
    return {
        {params.embed.data(), static_cast<size_t>(params.embed.size())},
        {params.enc_wx.data(), static_cast<size_t>(params.enc_wx.size())},
        {params.enc_wh.data(), static_cast<size_t>(params.enc_wh.size())},
        {params.enc_b.data(), static_cast<size_t>(params.enc_b.size())},
        {params.dec_wx.data(), static_cast<size_t>(params.dec_wx.size())},
        {params.dec_wh.data(), static_cast<size_t>(params.dec_wh.size())},
        {params.dec_b.data(), static_cast<size_t>(params.dec_b.size())},
        {params.out_w.data(), static_cast<size_t>(params.out_w.size())},
        {params.out_b.data(), static_cast<size_t>(params.out_b.size())},
    };
}

void Seq2SeqModel::initialize(const std::vector<std::string>& texts,
                              uint64_t seed) {
    if (initialized_) throw Error("model already initialized");
    for (const auto& text : texts) {
        for (const auto& tok : tokenize(text)) vocab_.add(tok);
    }
    // The two rendered targets must always be in vocabulary.
    for (const char* tok : {"answer:", "positive", "negative"}) vocab_.add(tok);

    allocate(vocab_.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.08, 0.08);
    for (auto& span : param_spans(p_)) {
        for (size_t i = 0; i < span.size; ++i) span.data[i] = dist(rng);
    }
    initialized_ = true;
}

size_t Seq2SeqModel::parameter_count() const {
    size_t n = 0;
    for (const auto& span : param_spans(const_cast<Params&>(p_))) n += span.size;
    return n;
}

std::vector<int> Seq2SeqModel::encode_input(const std::string& premise,
                                            const std::string& hypothesis,
                                            bool* truncated) const {
    std::vector<int> ids;
    for (const auto& tok : tokenize(premise)) ids.push_back(vocab_.id(tok));
    ids.push_back(Vocab::kSep);
    for (const auto& tok : tokenize(hypothesis)) ids.push_back(vocab_.id(tok));
    bool trunc = ids.size() > static_cast<size_t>(max_input_length_);
    if (trunc) {
        // Keep the tail: the hypothesis sits at the end.
        ids.erase(ids.begin(),
                  ids.end() - static_cast<size_t>(max_input_length_));
    }
    if (truncated) *truncated = trunc;
    return ids;
}

std::vector<int> Seq2SeqModel::encode_target(const std::string& target) const {
    std::vector<int> ids;
    for (const auto& tok : tokenize(target)) ids.push_back(vocab_.id(tok));
    ids.push_back(Vocab::kEos);
    return ids;
}

namespace {

// Numerically stable log-softmax in place; returns logsumexp.
void log_softmax(Eigen::VectorXd& logits) {
    double mx = logits.maxCoeff();
    double lse = mx + std::log((logits.array() - mx).exp().sum());
    logits.array() -= lse;
}

}  // namespace

double Seq2SeqModel::sequence_logprob(const std::vector<int>& input_ids,
                                      const std::vector<int>& target_ids,
                                      Tape* tape) const {
    if (!initialized_) throw Error("seq2seq model not initialized");
    Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden_);
    std::vector<Eigen::VectorXd> enc_h;
    enc_h.reserve(input_ids.size());
    for (int id : input_ids) {
        Eigen::VectorXd x = p_.embed.row(id).transpose();
        h = (p_.enc_wx * x + p_.enc_wh * h + p_.enc_b).array().tanh();
        enc_h.push_back(h);
    }

    Eigen::VectorXd s =
        enc_h.empty() ? Eigen::VectorXd::Zero(hidden_) : enc_h.back();
    std::vector<Eigen::VectorXd> dec_s, probs;
    dec_s.reserve(target_ids.size());
    probs.reserve(target_ids.size());

    double logprob = 0.0;
    int prev = Vocab::kBos;
    for (int y : target_ids) {
        Eigen::VectorXd x = p_.embed.row(prev).transpose();
        s = (p_.dec_wx * x + p_.dec_wh * s + p_.dec_b).array().tanh();
        Eigen::VectorXd logits = p_.out_w * s + p_.out_b;
        log_softmax(logits);
        logprob += logits(y);
        dec_s.push_back(s);
        probs.push_back(logits.array().exp());
        prev = y;
    }

    if (tape) {
        tape->input_ids = input_ids;
        tape->target_ids = target_ids;
        tape->enc_h = std::move(enc_h);
        tape->dec_s = std::move(dec_s);
        tape->probs = std::move(probs);
        tape->logprob = logprob;
    }
    return logprob;
}

std::vector<std::vector<double>> Seq2SeqModel::token_distributions(
    const std::vector<int>& input_ids,
    const std::vector<int>& target_ids) const {
    Tape tape;
    sequence_logprob(input_ids, target_ids, &tape);
    std::vector<std::vector<double>> out;
    out.reserve(tape.probs.size());
    for (const auto& p : tape.probs) {
        out.emplace_back(p.data(), p.data() + p.size());
    }
    return out;
}

void Seq2SeqModel::backward(const Tape& tape, double dl_dlogp,
                            Gradients& grads) const {
    if (dl_dlogp == 0.0) return;
    Params& g = grads.g;
    const int steps = static_cast<int>(tape.target_ids.size());

    Eigen::VectorXd ds_next = Eigen::VectorXd::Zero(hidden_);
    for (int t = steps - 1; t >= 0; --t) {
        const int y = tape.target_ids[static_cast<size_t>(t)];
        const Eigen::VectorXd& s_t = tape.dec_s[static_cast<size_t>(t)];
        // d logp / d logits = onehot(y) - softmax
        Eigen::VectorXd dlogits = -dl_dlogp * tape.probs[static_cast<size_t>(t)];
        dlogits(y) += dl_dlogp;

        g.out_w.noalias() += dlogits * s_t.transpose();
        g.out_b += dlogits;

        Eigen::VectorXd ds = p_.out_w.transpose() * dlogits + ds_next;
        Eigen::VectorXd da =
            ds.array() * (1.0 - s_t.array() * s_t.array());

        const int prev = t == 0 ? Vocab::kBos
                                : tape.target_ids[static_cast<size_t>(t - 1)];
        const Eigen::VectorXd s_prev =
            t == 0 ? (tape.enc_h.empty() ? Eigen::VectorXd::Zero(hidden_)
                                         : tape.enc_h.back())
                   : tape.dec_s[static_cast<size_t>(t - 1)];

        g.dec_wx.noalias() += da * p_.embed.row(prev);
        g.dec_wh.noalias() += da * s_prev.transpose();
        g.dec_b += da;
        g.embed.row(prev) += (p_.dec_wx.transpose() * da).transpose();
        ds_next = p_.dec_wh.transpose() * da;
    }

    // ds_next is now the gradient on the encoder's final state.
    Eigen::VectorXd dh_next = ds_next;
    for (int t = static_cast<int>(tape.input_ids.size()) - 1; t >= 0; --t) {
        const Eigen::VectorXd& h_t = tape.enc_h[static_cast<size_t>(t)];
        Eigen::VectorXd da =
            dh_next.array() * (1.0 - h_t.array() * h_t.array());
        const int x = tape.input_ids[static_cast<size_t>(t)];
        const Eigen::VectorXd h_prev =
            t == 0 ? Eigen::VectorXd::Zero(hidden_)
                   : tape.enc_h[static_cast<size_t>(t - 1)];

        g.enc_wx.noalias() += da * p_.embed.row(x);
        g.enc_wh.noalias() += da * h_prev.transpose();
        g.enc_b += da;
        g.embed.row(x) += (p_.enc_wx.transpose() * da).transpose();
        dh_next = p_.enc_wh.transpose() * da;
    }
}

Seq2SeqModel::Gradients Seq2SeqModel::make_gradients() const {
    if (!initialized_) throw Error("seq2seq model not initialized");
    Gradients grads;
    grads.g.embed = Eigen::MatrixXd::Zero(vocab_.size(), hidden_);
    grads.g.enc_wx = Eigen::MatrixXd::Zero(hidden_, hidden_);
    grads.g.enc_wh = Eigen::MatrixXd::Zero(hidden_, hidden_);
    grads.g.enc_b = Eigen::VectorXd::Zero(hidden_);
    grads.g.dec_wx = Eigen::MatrixXd::Zero(hidden_, hidden_);
    grads.g.dec_wh = Eigen::MatrixXd::Zero(hidden_, hidden_);
    grads.g.dec_b = Eigen::VectorXd::Zero(hidden_);
    grads.g.out_w = Eigen::MatrixXd::Zero(vocab_.size(), hidden_);
    grads.g.out_b = Eigen::VectorXd::Zero(vocab_.size());
    return grads;
}

void Seq2SeqModel::adam_step(Gradients& grads, double learning_rate) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (!adam_) {
        adam_ = std::make_unique<AdamState>();
        adam_->m = make_gradients().g;
        adam_->v = make_gradients().g;
    }
    ++adam_->t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_->t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_->t));

    auto ps = param_spans(p_);
    auto gs = param_spans(grads.g);
    auto ms = param_spans(adam_->m);
    auto vs = param_spans(adam_->v);
    for (size_t k = 0; k < ps.size(); ++k) {
        for (size_t i = 0; i < ps[k].size; ++i) {
            double gr = gs[k].data[i];
            double& m = ms[k].data[i];
            double& v = vs[k].data[i];
            m = b1 * m + (1.0 - b1) * gr;
            v = b2 * v + (1.0 - b2) * gr * gr;
            ps[k].data[i] -=
                learning_rate * (m / c1) / (std::sqrt(v / c2) + eps);
        }
    }
}

size_t Seq2SeqModel::flat_size() const {
    return parameter_count();
}

double Seq2SeqModel::get_flat(size_t i) const {
    for (const auto& span : param_spans(const_cast<Params&>(p_))) {
        if (i < span.size) return span.data[i];
        i -= span.size;
    }
    throw Error("flat index out of range");
}

void Seq2SeqModel::set_flat(size_t i, double v) {
    for (auto& span : param_spans(p_)) {
        if (i < span.size) {
            span.data[i] = v;
            return;
        }
        i -= span.size;
    }
    throw Error("flat index out of range");
}

double Seq2SeqModel::grad_flat(const Gradients& grads, size_t i) const {
    for (const auto& span : param_spans(const_cast<Params&>(grads.g))) {
        if (i < span.size) return span.data[i];
        i -= span.size;
    }
    throw Error("flat index out of range");
}

namespace {

constexpr char kMagic[8] = {'T', 'D', 'S', '2', 'S', 'v', '0', '1'};

void write_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void Seq2SeqModel::save(const std::string& path) const {
    if (!initialized_) throw Error("cannot save uninitialized model");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, static_cast<uint32_t>(hidden_));
    write_u32(out, static_cast<uint32_t>(max_input_length_));
    write_u32(out, static_cast<uint32_t>(vocab_.size()));
    for (int i = 0; i < vocab_.size(); ++i) {
        const std::string& tok = vocab_.token(i);
        write_u32(out, static_cast<uint32_t>(tok.size()));
        out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    }
    for (const auto& span : param_spans(const_cast<Params&>(p_))) {
        out.write(reinterpret_cast<const char*>(span.data),
                  static_cast<std::streamsize>(span.size * sizeof(double)));
    }
    if (!out) throw Error("short write on checkpoint: " + path);
}

std::unique_ptr<Seq2SeqModel> Seq2SeqModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error("not a seq2seq checkpoint: " + path);
    }
    int hidden = static_cast<int>(read_u32(in));
    int max_len = static_cast<int>(read_u32(in));
    int vocab_size = static_cast<int>(read_u32(in));

    auto model = std::make_unique<Seq2SeqModel>(hidden, max_len);
    for (int i = 0; i < vocab_size; ++i) {
        uint32_t len = read_u32(in);
        std::string tok(len, '\0');
        in.read(tok.data(), len);
        if (i >= 4) model->vocab_.add(tok);  // specials pre-registered
    }
    if (model->vocab_.size() != vocab_size) {
        throw Error("corrupt vocabulary in checkpoint: " + path);
    }
    model->allocate(vocab_size);
    for (auto& span : param_spans(model->p_)) {
        in.read(reinterpret_cast<char*>(span.data),
                static_cast<std::streamsize>(span.size * sizeof(double)));
    }
    if (!in) throw Error("truncated checkpoint: " + path);
    model->initialized_ = true;
    return model;
}

ScorerOutput PairScore::output() const {
    // Softmax over the two sequence log-likelihoods.
    double p_ent = 1.0 / (1.0 + std::exp(logp_neg - logp_pos));
    return ScorerOutput{p_ent, 1.0 - p_ent};
}

Seq2SeqBackend::Seq2SeqBackend(std::unique_ptr<Seq2SeqModel> model)
    : model_(std::move(model)) {}

std::unique_ptr<Seq2SeqBackend> Seq2SeqBackend::fresh(const std::string& preset,
                                                      int max_input_length) {
    int hidden;
    if (preset == "tiny") hidden = 32;
    else if (preset == "small") hidden = 64;
    else if (preset == "base") hidden = 128;
    else throw Error("unknown seq2seq preset: '" + preset + "'");
    return std::make_unique<Seq2SeqBackend>(
        std::make_unique<Seq2SeqModel>(hidden, max_input_length));
}

std::unique_ptr<Seq2SeqBackend> Seq2SeqBackend::open(const BackendConfig& config) {
    if (std::filesystem::exists(config.model)) {
        return std::make_unique<Seq2SeqBackend>(Seq2SeqModel::load(config.model));
    }
    return fresh(config.model, config.max_input_length);
}

void Seq2SeqBackend::initialize(const std::vector<std::string>& texts,
                                uint64_t seed) {
    model_->initialize(texts, seed);
}

ScorerOutput Seq2SeqBackend::score(const EntailmentExample& example) {
    return score_pair(example, false).output();
}

PairScore Seq2SeqBackend::score_pair(const EntailmentExample& example,
                                     bool keep_tape) {
    if (!model_->initialized()) {
        throw Error("seq2seq backend not initialized");
    }
    bool truncated = false;
    std::vector<int> input =
        model_->encode_input(example.premise, example.hypothesis, &truncated);
    if (truncated) ++truncations_;

    std::vector<int> pos = model_->encode_target(render_target(Target::positive));
    std::vector<int> neg = model_->encode_target(render_target(Target::negative));

    PairScore out;
    if (keep_tape) {
        TapePair pair;
        out.logp_pos = model_->sequence_logprob(input, pos, &pair.pos);
        out.logp_neg = model_->sequence_logprob(input, neg, &pair.neg);
        tapes_.push_back(std::move(pair));
        out.tape = static_cast<long>(tapes_.size()) - 1;
    } else {
        out.logp_pos = model_->sequence_logprob(input, pos);
        out.logp_neg = model_->sequence_logprob(input, neg);
    }
    return out;
}

void Seq2SeqBackend::backward(long tape, double dl_dlogp_pos,
                              double dl_dlogp_neg) {
    if (tape < 0 || tape >= static_cast<long>(tapes_.size())) {
        throw Error("invalid tape handle");
    }
    if (!grads_) {
        grads_ = std::make_unique<Seq2SeqModel::Gradients>(
            model_->make_gradients());
    }
    const TapePair& pair = tapes_[static_cast<size_t>(tape)];
    model_->backward(pair.pos, dl_dlogp_pos, *grads_);
    model_->backward(pair.neg, dl_dlogp_neg, *grads_);
}

void Seq2SeqBackend::zero_grad() {
    grads_.reset();
    tapes_.clear();
}

void Seq2SeqBackend::step(double learning_rate) {
    if (!grads_) return;  // nothing accumulated
    model_->adam_step(*grads_, learning_rate);
    zero_grad();
}

void Seq2SeqBackend::save(const std::string& path) const {
    model_->save(path);
}

}  // namespace tempdiff
