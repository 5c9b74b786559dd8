#include "tempdiff/predictor.hpp"

namespace tempdiff {

namespace {

double ent_score(Backend& backend, const std::string& premise,
                 const EventPair& pair, Relation r) {
    EntailmentExample ex;
    ex.premise = premise;
    ex.hypothesis = build_hypothesis(pair, r);
    ex.meta.hypothesis_relation = r;
    return backend.score(ex).p_ent;
}

Prediction vote(double score_before, double score_after) {
    Prediction out;
    out.score_before = score_before;
    out.score_after = score_after;
    if (score_before == score_after) {
        out.relation = Relation::before;
        out.tie_broken = true;
    } else {
        out.relation =
            score_before > score_after ? Relation::before : Relation::after;
    }
    return out;
}

}  // namespace

Prediction predict_relation(
    const std::string& context, const EventPair& pair, Backend& backend,
    const std::optional<std::string>& explanation,
    const std::optional<std::string>& additional_sentence) {
    std::string premise = build_premise(context, additional_sentence, explanation);
    return vote(ent_score(backend, premise, pair, Relation::before),
                ent_score(backend, premise, pair, Relation::after));
}

ShiftPrediction predict_shift(const DiffInstance& instance, Backend& backend,
                              bool include_explanation, ShiftRule rule) {
    std::optional<std::string> exp;
    if (include_explanation && instance.explanation) exp = instance.explanation;

    std::string with_as =
        build_premise(instance.context, instance.additional_sentence, exp);
    std::string without_as = build_premise(instance.context, std::nullopt, exp);

    double before_with = ent_score(backend, with_as, instance.pair, Relation::before);
    double before_without =
        ent_score(backend, without_as, instance.pair, Relation::before);
    double after_with = ent_score(backend, with_as, instance.pair, Relation::after);
    double after_without =
        ent_score(backend, without_as, instance.pair, Relation::after);

    ShiftPrediction out;
    out.delta_before = before_with - before_without;
    out.delta_after = after_with - after_without;

    if (rule == ShiftRule::delta) {
        // Ties break to "before", mirroring the vote rule.
        out.direction = out.delta_after > out.delta_before ? Relation::after
                                                           : Relation::before;
        return out;
    }

    // argmax_flip: the voted label with the sentence wins when it differs
    // from the unaugmented vote; otherwise fall back to the shared label's
    // own probability change.
    Prediction with_vote = vote(before_with, after_with);
    Prediction without_vote = vote(before_without, after_without);
    if (with_vote.relation != without_vote.relation) {
        out.direction = with_vote.relation;
    } else {
        double delta_shared = with_vote.relation == Relation::before
                                  ? out.delta_before
                                  : out.delta_after;
        out.direction =
            delta_shared >= 0.0 ? with_vote.relation : negate(with_vote.relation);
    }
    return out;
}

AugmentedContext augment_with_generated_explanation(
    const std::string& context, const EventPair& pair,
    Backend& explanation_verifier, const CandidateGenerator& generate) {
    AugmentedContext best;
    best.fallback = true;
    double best_score = -1.0;

    for (Relation r : {Relation::before, Relation::after}) {
        std::optional<std::pair<std::string, std::string>> candidate;
        try {
            candidate = generate(context, pair, r);
        } catch (const Error&) {
            candidate = std::nullopt;
        }
        if (!candidate) continue;

        EntailmentExample ex;
        ex.premise = build_premise(context, candidate->first, candidate->second);
        ex.hypothesis = build_hypothesis(pair, r);
        double score = explanation_verifier.score(ex).p_ent;
        if (score > best_score) {
            best_score = score;
            best.additional_sentence = candidate->first;
            best.explanation = candidate->second;
            best.verifier_score = score;
            best.fallback = false;
        }
    }
    return best;
}

Prediction predict_relation_augmented(const std::string& context,
                                      const EventPair& pair, Backend& backend,
                                      const AugmentedContext& augmented) {
    if (augmented.fallback) {
        return predict_relation(context, pair, backend);
    }
    return predict_relation(context, pair, backend, augmented.explanation,
                            augmented.additional_sentence);
}

}  // namespace tempdiff
