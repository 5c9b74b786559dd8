#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempdiff/completion.hpp"
#include "tempdiff/instance.hpp"
#include "tempdiff/similarity.hpp"
#include "tempdiff/verifier.hpp"

namespace tempdiff {

enum class PromptPurpose { event_pair, as_and_exp, exp_only, negative_exp };

// Plain-text prompt with {placeholder} slots. The final query block uses
// {context}, {e1}, {relation}, {e2}; demonstrations are literal text.
struct PromptTemplate {
    std::string id;
    std::string body;
    PromptPurpose purpose = PromptPurpose::as_and_exp;

    void validate() const;
    std::string render(const std::map<std::string, std::string>& values) const;
};

// Loads prompts/<id> files; ids: prompt_event_pair, prompt_as_exp,
// prompt_as_exp_2shot.
PromptTemplate load_prompt(const std::string& dir, const std::string& id,
                           PromptPurpose purpose);

// Candidate from a completion: first line is the sentence, the remainder
// is the explanation.
struct ParsedCandidate {
    std::string additional_sentence;
    std::string explanation;
};
ParsedCandidate parse_candidate_completion(const std::string& completion);

// Event pair from a completion: first line is the implicit event phrase,
// the second names the explicit phrase it is inferred from.
EventPair parse_event_pair_completion(const std::string& completion,
                                      const std::string& context);

// Asks the client for an implicit/explicit event pair over the context.
// Parse failures and context copies consume the retry budget.
EventPair generate_event_pair(const std::string& context,
                              CompletionClient& client,
                              const PromptTemplate& tmpl,
                              const GenerationPolicy& policy);

// One generated (AS, Exp) candidate for the claimed direction, with full
// provenance attached.
SupervisionCandidate generate_candidate(const std::string& context,
                                        const EventPair& pair,
                                        Relation direction,
                                        CompletionClient& client,
                                        const PromptTemplate& tmpl,
                                        const GenerationPolicy& policy,
                                        const std::string& id,
                                        const std::string& timestamp);

// Requests k explanations for the instance's sentence and returns the one
// least similar to the human annotation.
std::string mine_negative_explanation(const DiffInstance& instance,
                                      CompletionClient& client,
                                      const PromptTemplate& tmpl,
                                      const SimilarityModel& similarity,
                                      int k = 3,
                                      std::string* warning = nullptr);

// Exp-only prompt: the as_and_exp prompt with the given sentence already
// written, so the completion continues with the explanation.
std::string render_exp_only_prompt(const PromptTemplate& tmpl,
                                   const DiffInstance& instance);

// Verdict on one candidate; appends the stage verdicts it ran.
using CandidateJudge = std::function<bool(SupervisionCandidate&)>;

// Adapts the verifier cascade to the distill loop.
CandidateJudge make_cascade_judge(const CascadeCheckpoints& checkpoints,
                                  const std::vector<VerifierStage>& order);

struct DistillConfig {
    int target_accepted = 0;
    uint64_t seed = 0;
    std::string out_dir;  // accepted.jsonl + audit.jsonl live here
    GenerationPolicy policy;
    // Injectable for reproducible provenance; defaults to the wall clock.
    std::function<std::string()> timestamp_fn;
};

struct DistillResult {
    std::vector<SupervisionCandidate> accepted;  // including resumed rows
    size_t candidates_attempted = 0;             // this run
    size_t contexts_consumed = 0;                // this run
};

// Generation loop: per context, one event pair and one candidate per
// direction, judged and persisted immediately. Resumes from the audit log
// in out_dir; stops at target_accepted or context exhaustion.
DistillResult distill(const std::vector<std::string>& contexts,
                      const DistillConfig& config, CompletionClient& client,
                      const PromptTemplate& event_pair_prompt,
                      const PromptTemplate& candidate_prompt,
                      const CandidateJudge& judge);

// Candidate rows persisted with payload, provenance, and verdict history.
std::string serialize_candidate(const SupervisionCandidate& candidate);
SupervisionCandidate parse_candidate(const std::string& line);

// Deterministic offline handler producing parseable completions for the
// bundled prompt shapes; backs the mock-client mode.
MockCompletionClient::Handler canned_completion_handler();

}  // namespace tempdiff
