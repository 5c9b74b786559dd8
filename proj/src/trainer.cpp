#include "tempdiff/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tempdiff/entailment.hpp"
#include "tempdiff/error.hpp"
#include "tempdiff/seq2seq.hpp"

namespace tempdiff {

namespace {

namespace fs = std::filesystem;

// Cycles through a corpus in seeded shuffled order, reshuffling per epoch.
class BatchSampler {
public:
    BatchSampler(size_t n, std::mt19937_64& rng) : rng_(rng), order_(n) {
        for (size_t i = 0; i < n; ++i) order_[i] = i;
    }

    size_t next() {
        if (pos_ == order_.size()) {
            std::shuffle(order_.begin(), order_.end(), rng_);
            pos_ = 0;
        }
        return order_[pos_++];
    }

    bool empty() const { return order_.empty(); }

private:
    std::mt19937_64& rng_;
    std::vector<size_t> order_;
    size_t pos_ = 0;
};

// Entailment probability plus the hooks needed to push gradient back
// through it. On non-trainable backends the tape stays -1.
struct ScoredExample {
    double p_ent = 0.5;
    double logp_target_pos = 0.0;
    double logp_target_neg = 0.0;
    long tape = -1;
};

ScoredExample score_example(Backend& backend, TrainableBackend* trainable,
                            const EntailmentExample& ex) {
    ScoredExample out;
    if (trainable) {
        PairScore ps = trainable->score_pair(ex, true);
        out.p_ent = ps.output().p_ent;
        out.logp_target_pos = ps.logp_pos;
        out.logp_target_neg = ps.logp_neg;
        out.tape = ps.tape;
    } else {
        out.p_ent = backend.score(ex).p_ent;
    }
    return out;
}

// dL/dp_ent -> (dL/dlogp_pos, dL/dlogp_neg), since p_ent is the softmax of
// the two sequence log-likelihoods.
void backprop_p_ent(TrainableBackend& trainable, const ScoredExample& s,
                    double dl_dp_ent) {
    if (dl_dp_ent == 0.0 || s.tape < 0) return;
    double dp = s.p_ent * (1.0 - s.p_ent);
    trainable.backward(s.tape, dl_dp_ent * dp, -dl_dp_ent * dp);
}

double check_finite(double loss, int step, const char* what) {
    if (!std::isfinite(loss)) {
        throw Error("non-finite " + std::string(what) + " at step " +
                    std::to_string(step) + "; aborting");
    }
    return loss;
}

void write_config_snapshot(std::ostream& out, const TrainConfig& cfg) {
    out << "epsilon = " << cfg.epsilon << "\n";
    out << "alpha = " << cfg.alpha << "\n";
    out << "steps = " << cfg.steps << "\n";
    out << "batch_size = " << cfg.batch_size << "\n";
    if (cfg.mix_ratio) out << "mix_ratio = " << *cfg.mix_ratio << "\n";
    else out << "mix_ratio = proportional\n";
    out << "learning_rate = " << cfg.learning_rate << "\n";
    out << "seed = " << cfg.seed << "\n";
}

}  // namespace

void TrainConfig::validate() const {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    if (alpha < 0.0) throw ValidationError("alpha must be >= 0");
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (mix_ratio && !(*mix_ratio >= 0.0 && *mix_ratio <= 1.0)) {
        throw ValidationError("mix_ratio must be in [0,1]");
    }
    if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
}

void ExplanationPair::validate() const {
    positive.validate();
    if (!positive.explanation) {
        throw ValidationError("positive instance '" + positive.id +
                              "' lacks an explanation");
    }
    if (negative_explanation.empty()) {
        throw ValidationError("negative explanation for '" + positive.id +
                              "' is empty");
    }
}

std::vector<std::string> collect_texts(const std::vector<HardInstance>& hard,
                                       const std::vector<DiffInstance>& diff) {
    std::vector<std::string> texts;
    for (const auto& inst : hard) {
        for (const auto& ex : encode_hard(inst)) {
            texts.push_back(ex.premise);
            texts.push_back(ex.hypothesis);
        }
    }
    for (const auto& inst : diff) {
        for (const auto& ex : encode_relative(inst, true)) {
            texts.push_back(ex.premise);
            texts.push_back(ex.hypothesis);
        }
    }
    texts.push_back(render_target(Target::positive));
    texts.push_back(render_target(Target::negative));
    return texts;
}

TrainResult train(const std::vector<HardInstance>& hard,
                  const std::vector<DiffInstance>& diff,
                  const TrainConfig& cfg, Backend& backend) {
    cfg.validate();
    if (hard.empty() && diff.empty()) {
        throw Error("training requires at least one non-empty corpus");
    }

    auto* trainable = dynamic_cast<TrainableBackend*>(&backend);
    if (auto* s2s = dynamic_cast<Seq2SeqBackend*>(&backend);
        s2s && !s2s->initialized()) {
        s2s->initialize(collect_texts(hard, diff), cfg.seed);
    }

    std::mt19937_64 rng(cfg.seed);
    BatchSampler hard_sampler(hard.size(), rng);
    BatchSampler diff_sampler(diff.size(), rng);

    double rel_fraction;
    if (diff.empty()) rel_fraction = 0.0;
    else if (hard.empty()) rel_fraction = 1.0;
    else if (cfg.mix_ratio) rel_fraction = *cfg.mix_ratio;
    else {
        rel_fraction = static_cast<double>(diff.size()) /
                       static_cast<double>(hard.size() + diff.size());
    }

    TrainResult result;
    result.losses.reserve(static_cast<size_t>(cfg.steps));

    for (int step = 0; step < cfg.steps; ++step) {
        int n_rel = static_cast<int>(
            std::lround(rel_fraction * cfg.batch_size));
        n_rel = std::clamp(n_rel, 0, cfg.batch_size);
        if (hard.empty()) n_rel = cfg.batch_size;
        if (diff.empty()) n_rel = 0;
        int n_hard = cfg.batch_size - n_rel;

        if (trainable) trainable->zero_grad();

        // Cross-entropy branch: two rendered targets per hard instance.
        double ce_sum = 0.0;
        int ce_examples = 0;
        std::vector<std::pair<ScoredExample, Target>> ce_scored;
        for (int b = 0; b < n_hard; ++b) {
            const HardInstance& inst = hard[hard_sampler.next()];
            for (const auto& ex : encode_hard(inst)) {
                ScoredExample s = score_example(backend, trainable, ex);
                double p_target = *ex.target == Target::positive
                                      ? s.p_ent
                                      : 1.0 - s.p_ent;
                if (trainable) {
                    double logp = *ex.target == Target::positive
                                      ? s.logp_target_pos
                                      : s.logp_target_neg;
                    ce_sum += -logp;
                } else {
                    ce_sum += -std::log(std::max(p_target, 1e-12));
                }
                ce_scored.emplace_back(s, *ex.target);
                ++ce_examples;
            }
        }
        double ce = ce_examples ? ce_sum / ce_examples : 0.0;

        // Margin ranking branch: one quadruple per relative instance.
        double mr_sum = 0.0;
        std::vector<std::pair<std::array<ScoredExample, 4>, RankQuadruple>>
            mr_scored;
        for (int b = 0; b < n_rel; ++b) {
            const DiffInstance& inst = diff[diff_sampler.next()];
            auto examples = encode_relative(inst, true);
            std::array<ScoredExample, 4> scored;
            for (int i = 0; i < 4; ++i) {
                scored[i] = score_example(backend, trainable, examples[i]);
            }
            RankQuadruple q{scored[0].p_ent, scored[1].p_ent,
                            scored[2].p_ent, scored[3].p_ent};
            mr_sum += mr_loss(q, cfg.epsilon);
            mr_scored.emplace_back(scored, q);
        }
        double mr = n_rel ? mr_sum / n_rel : 0.0;

        double loss = check_finite(joint_loss(ce, mr, cfg.alpha), step, "loss");
        result.losses.push_back(loss);

        if (trainable) {
            // d(alpha * ce)/d(logp_target) = -alpha / n_examples
            if (ce_examples) {
                double coeff = -cfg.alpha / ce_examples;
                for (const auto& [s, target] : ce_scored) {
                    if (target == Target::positive) {
                        trainable->backward(s.tape, coeff, 0.0);
                    } else {
                        trainable->backward(s.tape, 0.0, coeff);
                    }
                }
            }
            if (!mr_scored.empty()) {
                double coeff = 1.0 / static_cast<double>(mr_scored.size());
                for (const auto& [scored, q] : mr_scored) {
                    auto grad = mr_loss_grad(q, cfg.epsilon);
                    for (int i = 0; i < 4; ++i) {
                        backprop_p_ent(*trainable, scored[i], coeff * grad[i]);
                    }
                }
            }
            trainable->step(cfg.learning_rate);
        }
    }
    return result;
}

TrainResult train_explanation_verifier(const std::vector<ExplanationPair>& pairs,
                                       const TrainConfig& cfg, Backend& backend) {
    cfg.validate();
    if (pairs.empty()) throw Error("explanation verifier requires training pairs");
    for (const auto& pair : pairs) pair.validate();

    auto* trainable = dynamic_cast<TrainableBackend*>(&backend);
    if (auto* s2s = dynamic_cast<Seq2SeqBackend*>(&backend);
        s2s && !s2s->initialized()) {
        std::vector<std::string> texts;
        for (const auto& pair : pairs) {
            DiffInstance neg = pair.positive;
            neg.explanation = pair.negative_explanation;
            for (const auto& inst : {pair.positive, neg}) {
                for (const auto& ex : encode_relative(inst, true)) {
                    texts.push_back(ex.premise);
                    texts.push_back(ex.hypothesis);
                }
            }
        }
        texts.push_back(render_target(Target::positive));
        texts.push_back(render_target(Target::negative));
        s2s->initialize(texts, cfg.seed);
    }

    std::mt19937_64 rng(cfg.seed);
    BatchSampler sampler(pairs.size(), rng);

    TrainResult result;
    result.losses.reserve(static_cast<size_t>(cfg.steps));
    for (int step = 0; step < cfg.steps; ++step) {
        if (trainable) trainable->zero_grad();
        double loss_sum = 0.0;
        std::vector<std::tuple<ScoredExample, ScoredExample, double, double>>
            scored;
        for (int b = 0; b < cfg.batch_size; ++b) {
            const ExplanationPair& pair = pairs[sampler.next()];
            EntailmentExample pos_ex;
            pos_ex.premise = build_premise(pair.positive.context,
                                           pair.positive.additional_sentence,
                                           pair.positive.explanation);
            pos_ex.hypothesis = build_hypothesis(pair.positive.pair,
                                                 pair.positive.direction);
            EntailmentExample neg_ex = pos_ex;
            neg_ex.premise = build_premise(pair.positive.context,
                                           pair.positive.additional_sentence,
                                           pair.negative_explanation);

            ScoredExample sp = score_example(backend, trainable, pos_ex);
            ScoredExample sn = score_example(backend, trainable, neg_ex);
            loss_sum += explanation_pair_loss(sp.p_ent, sn.p_ent);
            auto grad = explanation_pair_loss_grad(sp.p_ent, sn.p_ent);
            scored.emplace_back(sp, sn, grad[0], grad[1]);
        }
        double loss = check_finite(loss_sum / cfg.batch_size, step,
                                   "explanation loss");
        result.losses.push_back(loss);

        if (trainable) {
            double coeff = 1.0 / cfg.batch_size;
            for (const auto& [sp, sn, gp, gn] : scored) {
                backprop_p_ent(*trainable, sp, coeff * gp);
                backprop_p_ent(*trainable, sn, coeff * gn);
            }
            trainable->step(cfg.learning_rate);
        }
    }
    return result;
}

void write_checkpoint(const std::string& dir, const TrainConfig& cfg,
                      const TrainResult& result, const Backend& backend) {
    fs::create_directories(dir);

    if (auto* trainable = dynamic_cast<const TrainableBackend*>(&backend)) {
        trainable->save((fs::path(dir) / "weights.bin").string());
    }

    std::ofstream config_out(fs::path(dir) / "train_config");
    if (!config_out) throw Error("cannot write train_config in " + dir);
    write_config_snapshot(config_out, cfg);

    std::ofstream trace_out(fs::path(dir) / "loss_trace.txt");
    if (!trace_out) throw Error("cannot write loss_trace.txt in " + dir);
    trace_out << "# epsilon = " << cfg.epsilon << "\n";
    trace_out << "# alpha = " << cfg.alpha << "\n";
    trace_out << "# step loss\n";
    for (size_t i = 0; i < result.losses.size(); ++i) {
        trace_out << i << " " << result.losses[i] << "\n";
    }
}

std::unique_ptr<Backend> load_checkpoint(const std::string& dir) {
    fs::path weights = fs::path(dir) / "weights.bin";
    if (fs::exists(weights)) {
        return std::make_unique<Seq2SeqBackend>(
            Seq2SeqModel::load(weights.string()));
    }
    fs::path mock = fs::path(dir) / "mock.jsonl";
    if (fs::exists(mock)) {
        return MockBackend::from_file(mock.string());
    }
    throw Error("no backend found in checkpoint directory: " + dir);
}

}  // namespace tempdiff
