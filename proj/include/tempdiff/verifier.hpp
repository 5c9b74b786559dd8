#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempdiff/instance.hpp"
#include "tempdiff/scorer.hpp"
#include "tempdiff/similarity.hpp"

namespace tempdiff {

enum class VerifierStage {
    similarity,
    general,
    additional_sentence,
    explanation,
};

const char* to_string(VerifierStage stage);
VerifierStage verifier_stage_from_string(const std::string& s);

struct VerifierVerdict {
    VerifierStage stage = VerifierStage::similarity;
    bool passed = false;
    double score = 0.0;
    std::string detail;
};

// Where a generated instance came from.
struct Provenance {
    std::string generator_model;
    std::string prompt_id;
    std::string timestamp;
};

// LLM-generated relative-label instance awaiting verification. The payload
// is exempt from the context-substring invariant; rejecting near-copies is
// the similarity stage's job.
struct SupervisionCandidate {
    DiffInstance payload;
    Provenance provenance;
    std::vector<VerifierVerdict> verdicts;

    void validate() const;
};

// Rejects sentences lifted from the context and explanations that merely
// restate the event pair, at the given cosine threshold.
VerifierVerdict similarity_filter(const SupervisionCandidate& candidate,
                                  const SimilarityModel& model,
                                  double threshold = 0.95);

// Passes when the full premise (sentence + explanation) shifts entailment
// toward the claimed direction and contradiction away from it.
VerifierVerdict general_verify(const SupervisionCandidate& candidate,
                               Backend& joint_checkpoint);

// Same shift test with explanations excluded from every premise.
VerifierVerdict as_verify(const SupervisionCandidate& candidate,
                          Backend& as_checkpoint);

// Binary plausibility call on the explanation itself.
VerifierVerdict exp_verify(const SupervisionCandidate& candidate,
                           Backend& exp_checkpoint, double threshold = 0.5);

struct CascadeCheckpoints {
    const SimilarityModel* similarity = nullptr;
    Backend* general = nullptr;
    Backend* additional_sentence = nullptr;
    Backend* explanation = nullptr;
    double similarity_threshold = 0.95;
    double explanation_threshold = 0.5;
};

struct CascadeResult {
    std::vector<SupervisionCandidate> accepted;
    // One audit row per (candidate, stage) actually run, in stage order.
    std::vector<std::pair<std::string, VerifierVerdict>> audit;
};

// Default stage order; individual stages can be dropped to reproduce
// ablation configurations.
std::vector<VerifierStage> default_stage_order();

// Applies the stages in order with short-circuit on the first failure.
// Every candidate keeps the verdict history of the stages it reached.
CascadeResult run_cascade(std::vector<SupervisionCandidate> candidates,
                          const CascadeCheckpoints& checkpoints,
                          const std::vector<VerifierStage>& order);

// Audit rows in the record format: id, stage, passed, score.
std::string serialize_audit_row(const std::string& id,
                                const VerifierVerdict& verdict);
std::pair<std::string, VerifierVerdict> parse_audit_row(const std::string& line);

}  // namespace tempdiff
