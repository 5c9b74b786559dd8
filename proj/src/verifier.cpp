#include "tempdiff/verifier.hpp"

#include <algorithm>

#include <json.hpp>

#include "tempdiff/entailment.hpp"
#include "tempdiff/error.hpp"
#include "tempdiff/text.hpp"

namespace tempdiff {

const char* to_string(VerifierStage stage) {
    switch (stage) {
        case VerifierStage::similarity: return "similarity";
        case VerifierStage::general: return "general";
        case VerifierStage::additional_sentence: return "additional_sentence";
        default: return "explanation";
    }
}

VerifierStage verifier_stage_from_string(const std::string& s) {
    if (s == "similarity") return VerifierStage::similarity;
    if (s == "general") return VerifierStage::general;
    if (s == "additional_sentence" || s == "addition") {
        return VerifierStage::additional_sentence;
    }
    if (s == "explanation") return VerifierStage::explanation;
    throw ValidationError("unknown verifier stage: '" + s + "'");
}

void SupervisionCandidate::validate() const {
    payload.validate(/*check_substring=*/false);
    for (size_t i = 1; i < verdicts.size(); ++i) {
        for (size_t j = 0; j < i; ++j) {
            if (verdicts[i].stage == verdicts[j].stage) {
                throw ValidationError("candidate '" + payload.id +
                                      "' has two verdicts for stage " +
                                      to_string(verdicts[i].stage));
            }
        }
    }
}

VerifierVerdict similarity_filter(const SupervisionCandidate& candidate,
                                  const SimilarityModel& model,
                                  double threshold) {
    VerifierVerdict v;
    v.stage = VerifierStage::similarity;

    const DiffInstance& inst = candidate.payload;
    if (inst.additional_sentence.empty()) {
        v.detail = "empty additional sentence";
        return v;
    }
    if (!inst.explanation || inst.explanation->empty()) {
        v.detail = "empty explanation";
        return v;
    }

    double max_sim = 0.0;
    std::string offender;
    for (const auto& sentence : split_sentences(inst.context)) {
        double s = model.similarity(inst.additional_sentence, sentence);
        if (s > max_sim) {
            max_sim = s;
            offender = "additional sentence repeats context: " + sentence;
        }
    }
    std::string statement = build_hypothesis(inst.pair, inst.direction);
    double s = model.similarity(*inst.explanation, statement);
    if (s > max_sim) {
        max_sim = s;
        offender = "explanation restates the event pair";
    }

    v.score = max_sim;
    v.passed = max_sim < threshold;
    if (!v.passed) v.detail = offender;
    return v;
}

namespace {

double ent(Backend& backend, const std::string& premise,
           const EventPair& pair, Relation r) {
    EntailmentExample ex;
    ex.premise = premise;
    ex.hypothesis = build_hypothesis(pair, r);
    ex.meta.hypothesis_relation = r;
    return backend.score(ex).p_ent;
}

double con(Backend& backend, const std::string& premise,
           const EventPair& pair, Relation r) {
    EntailmentExample ex;
    ex.premise = premise;
    ex.hypothesis = build_hypothesis(pair, r);
    ex.meta.hypothesis_relation = r;
    return backend.score(ex).p_con;
}

// Shared shift test: entailment must strictly rise for the claimed
// direction and contradiction must strictly rise for the opposite one.
VerifierVerdict shift_verdict(const SupervisionCandidate& candidate,
                              Backend& backend, VerifierStage stage,
                              bool include_explanation) {
    VerifierVerdict v;
    v.stage = stage;

    const DiffInstance& inst = candidate.payload;
    if (inst.additional_sentence.empty()) {
        v.detail = "empty additional sentence";
        return v;
    }
    std::optional<std::string> exp;
    if (include_explanation && inst.explanation) exp = inst.explanation;

    std::string with_as = build_premise(inst.context, inst.additional_sentence, exp);
    std::string without_as = build_premise(inst.context, std::nullopt, exp);

    double ent_margin = ent(backend, with_as, inst.pair, inst.direction) -
                        ent(backend, without_as, inst.pair, inst.direction);
    Relation opposite = negate(inst.direction);
    double con_margin = con(backend, with_as, inst.pair, opposite) -
                        con(backend, without_as, inst.pair, opposite);

    v.score = std::min(ent_margin, con_margin);
    v.passed = ent_margin > 0.0 && con_margin > 0.0;
    if (!v.passed) {
        v.detail = ent_margin <= 0.0 ? "no entailment shift toward claimed direction"
                                     : "no contradiction shift away from opposite";
    }
    return v;
}

}  // namespace

VerifierVerdict general_verify(const SupervisionCandidate& candidate,
                               Backend& joint_checkpoint) {
    return shift_verdict(candidate, joint_checkpoint, VerifierStage::general,
                         /*include_explanation=*/true);
}

VerifierVerdict as_verify(const SupervisionCandidate& candidate,
                          Backend& as_checkpoint) {
    return shift_verdict(candidate, as_checkpoint,
                         VerifierStage::additional_sentence,
                         /*include_explanation=*/false);
}

VerifierVerdict exp_verify(const SupervisionCandidate& candidate,
                           Backend& exp_checkpoint, double threshold) {
    VerifierVerdict v;
    v.stage = VerifierStage::explanation;

    const DiffInstance& inst = candidate.payload;
    if (!inst.explanation || inst.explanation->empty()) {
        v.detail = "no explanation to verify";
        return v;
    }
    std::string premise =
        build_premise(inst.context, inst.additional_sentence, inst.explanation);
    v.score = ent(exp_checkpoint, premise, inst.pair, inst.direction);
    v.passed = v.score >= threshold;
    if (!v.passed) v.detail = "explanation deemed negative";
    return v;
}

std::vector<VerifierStage> default_stage_order() {
    return {VerifierStage::similarity, VerifierStage::general,
            VerifierStage::additional_sentence, VerifierStage::explanation};
}

CascadeResult run_cascade(std::vector<SupervisionCandidate> candidates,
                          const CascadeCheckpoints& checkpoints,
                          const std::vector<VerifierStage>& order) {
    for (VerifierStage stage : order) {
        switch (stage) {
            case VerifierStage::similarity:
                if (!checkpoints.similarity) {
                    throw Error("similarity stage enabled without a model");
                }
                break;
            case VerifierStage::general:
                if (!checkpoints.general) {
                    throw Error("general stage enabled without a checkpoint");
                }
                break;
            case VerifierStage::additional_sentence:
                if (!checkpoints.additional_sentence) {
                    throw Error("additional-sentence stage enabled without a checkpoint");
                }
                break;
            case VerifierStage::explanation:
                if (!checkpoints.explanation) {
                    throw Error("explanation stage enabled without a checkpoint");
                }
                break;
        }
    }

    CascadeResult result;
    for (auto& candidate : candidates) {
        candidate.validate();
        bool accepted = true;
        for (VerifierStage stage : order) {
            VerifierVerdict verdict;
            switch (stage) {
                case VerifierStage::similarity:
                    verdict = similarity_filter(candidate, *checkpoints.similarity,
                                                checkpoints.similarity_threshold);
                    break;
                case VerifierStage::general:
                    verdict = general_verify(candidate, *checkpoints.general);
                    break;
                case VerifierStage::additional_sentence:
                    verdict = as_verify(candidate, *checkpoints.additional_sentence);
                    break;
                case VerifierStage::explanation:
                    verdict = exp_verify(candidate, *checkpoints.explanation,
                                         checkpoints.explanation_threshold);
                    break;
            }
            candidate.verdicts.push_back(verdict);
            result.audit.emplace_back(candidate.payload.id, verdict);
            if (!verdict.passed) {
                accepted = false;
                break;
            }
        }
        if (accepted) result.accepted.push_back(std::move(candidate));
    }
    return result;
}

std::string serialize_audit_row(const std::string& id,
                                const VerifierVerdict& verdict) {
    nlohmann::ordered_json rec;
    rec["id"] = id;
    rec["stage"] = to_string(verdict.stage);
    rec["passed"] = verdict.passed;
    rec["score"] = verdict.score;
    if (!verdict.detail.empty()) rec["detail"] = verdict.detail;
    return rec.dump();
}

std::pair<std::string, VerifierVerdict> parse_audit_row(const std::string& line) {
    auto rec = nlohmann::json::parse(line);
    VerifierVerdict v;
    v.stage = verifier_stage_from_string(rec.at("stage").get<std::string>());
    v.passed = rec.at("passed").get<bool>();
    v.score = rec.at("score").get<double>();
    if (rec.contains("detail")) v.detail = rec["detail"].get<std::string>();
    return {rec.at("id").get<std::string>(), v};
}

}  // namespace tempdiff
