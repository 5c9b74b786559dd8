#pragma once

#include <functional>
#include <optional>
#include <string>

#include "tempdiff/entailment.hpp"
#include "tempdiff/scorer.hpp"

namespace tempdiff {

// Probability-based vote between the two hypothesis renderings. Exact ties
// break to "before" and are flagged.
struct Prediction {
    Relation relation = Relation::before;
    double score_before = 0.0;
    double score_after = 0.0;
    bool tie_broken = false;
};

// Differential readout: per-relation change in entailment probability when
// the additional sentence is prepended.
struct ShiftPrediction {
    Relation direction = Relation::before;
    double delta_before = 0.0;
    double delta_after = 0.0;
};

enum class ShiftRule {
    delta,        // argmax over per-relation probability deltas
    argmax_flip,  // compare voted labels with and without the sentence
};

Prediction predict_relation(
    const std::string& context, const EventPair& pair, Backend& backend,
    const std::optional<std::string>& explanation = std::nullopt,
    const std::optional<std::string>& additional_sentence = std::nullopt);

// Shift-direction prediction for a relative-label instance; the gold
// direction field is ignored by construction (callers may pass test
// instances unchanged).
ShiftPrediction predict_shift(const DiffInstance& instance, Backend& backend,
                              bool include_explanation,
                              ShiftRule rule = ShiftRule::delta);

// Candidate generator used by explanation-augmented inference: produces an
// (additional sentence, explanation) pair for a requested direction, or
// nothing when generation fails.
using CandidateGenerator = std::function<
    std::optional<std::pair<std::string, std::string>>(
        const std::string& context, const EventPair& pair, Relation direction)>;

struct AugmentedContext {
    std::optional<std::string> additional_sentence;
    std::optional<std::string> explanation;
    bool fallback = false;  // generation failed; prediction ran unaugmented
    double verifier_score = 0.0;
};

// Generates one candidate per relation direction, scores both with the
// explanation verifier, and keeps the higher-scoring pair.
AugmentedContext augment_with_generated_explanation(
    const std::string& context, const EventPair& pair,
    Backend& explanation_verifier, const CandidateGenerator& generate);

// Vote with the selected candidate attached to the premise.
Prediction predict_relation_augmented(const std::string& context,
                                      const EventPair& pair, Backend& backend,
                                      const AugmentedContext& augmented);

}  // namespace tempdiff
