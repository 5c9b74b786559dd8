#include "tempdiff/distiller.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tempdiff/entailment.hpp"
#include "tempdiff/instance_store.hpp"
#include "tempdiff/text.hpp"

namespace tempdiff {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& required_placeholders(PromptPurpose purpose) {
    static const std::vector<std::string> context_only = {"context"};
    static const std::vector<std::string> full = {"context", "e1", "relation", "e2"};
    return purpose == PromptPurpose::event_pair ? context_only : full;
}

std::string default_timestamp() {
    auto now = std::chrono::system_clock::now();
    auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
    return std::to_string(secs.count());
}

std::vector<std::string> non_empty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) lines.push_back(std::move(t));
    }
    return lines;
}

}  // namespace

void PromptTemplate::validate() const {
    if (id.empty()) throw ValidationError("prompt template id must be non-empty");
    if (body.empty()) throw ValidationError("prompt '" + id + "' has an empty body");
    for (const auto& name : required_placeholders(purpose)) {
        if (body.find("{" + name + "}") == std::string::npos) {
            throw ValidationError("prompt '" + id + "' is missing placeholder {" +
                                  name + "}");
        }
    }
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& values) const {
    std::string out = body;
    for (const auto& [name, value] : values) {
        const std::string slot = "{" + name + "}";
        size_t pos = 0;
        while ((pos = out.find(slot, pos)) != std::string::npos) {
            out.replace(pos, slot.size(), value);
            pos += value.size();
        }
    }
    return out;
}

PromptTemplate load_prompt(const std::string& dir, const std::string& id,
                           PromptPurpose purpose) {
    fs::path path = fs::path(dir) / id;
    std::ifstream in(path);
    if (!in) throw Error("cannot open prompt template: " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    PromptTemplate tmpl{id, body.str(), purpose};
    tmpl.validate();
    return tmpl;
}

ParsedCandidate parse_candidate_completion(const std::string& completion) {
    auto lines = non_empty_lines(completion);
    if (lines.size() < 2) {
        throw ParseError("completion lacks the sentence/explanation shape");
    }
    ParsedCandidate out;
    out.additional_sentence = lines[0];
    std::vector<std::string> rest(lines.begin() + 1, lines.end());
    out.explanation = join(rest, " ");
    if (starts_with(out.explanation, "Explanation:")) {
        out.explanation = trim(out.explanation.substr(12));
    }
    if (out.explanation.empty()) {
        throw ParseError("completion has no explanation line");
    }
    return out;
}

EventPair parse_event_pair_completion(const std::string& completion,
                                      const std::string& context) {
    auto lines = non_empty_lines(completion);
    if (lines.size() < 2) {
        throw ParseError("completion lacks the event/antecedent shape");
    }
    std::string implicit = lines[0];
    if (!implicit.empty() && implicit.back() == '.') implicit.pop_back();
    if (implicit.empty()) throw ParseError("empty implicit event phrase");
    if (tokenize(implicit).size() > 10) {
        throw ParseError("implicit event phrase exceeds ten words");
    }
    if (context.find(implicit) != std::string::npos) {
        throw ParseError("implicit event phrase copied from context");
    }

    static const std::string kPrefix = "It can be inferred from";
    if (!starts_with(lines[1], kPrefix)) {
        throw ParseError("second line does not name the explicit phrase");
    }
    std::string explicit_phrase = trim(lines[1].substr(kPrefix.size()));
    if (!explicit_phrase.empty() && explicit_phrase.back() == '.') {
        explicit_phrase.pop_back();
        explicit_phrase = trim(explicit_phrase);
    }
    if (explicit_phrase.empty()) throw ParseError("empty explicit event phrase");

    EventPair pair{implicit, explicit_phrase};
    pair.validate();
    return pair;
}

EventPair generate_event_pair(const std::string& context,
                              CompletionClient& client,
                              const PromptTemplate& tmpl,
                              const GenerationPolicy& policy) {
    policy.validate();
    std::string prompt = tmpl.render({{"context", context}});
    std::string last_error;
    for (int attempt = 0; attempt <= policy.retry_budget; ++attempt) {
        auto completions = client.complete(prompt, policy.completions_per_request);
        for (const auto& completion : completions) {
            try {
                return parse_event_pair_completion(completion, context);
            } catch (const ParseError& e) {
                last_error = e.what();
            }
        }
    }
    throw ParseError("event pair generation exhausted retries: " + last_error);
}

SupervisionCandidate generate_candidate(const std::string& context,
                                        const EventPair& pair,
                                        Relation direction,
                                        CompletionClient& client,
                                        const PromptTemplate& tmpl,
                                        const GenerationPolicy& policy,
                                        const std::string& id,
                                        const std::string& timestamp) {
    policy.validate();
    std::string prompt = tmpl.render({{"context", context},
                                      {"e1", pair.e1},
                                      {"relation", to_string(direction)},
                                      {"e2", pair.e2}});
    std::string last_error;
    for (int attempt = 0; attempt <= policy.retry_budget; ++attempt) {
        auto completions = client.complete(prompt, policy.completions_per_request);
        for (const auto& completion : completions) {
            try {
                ParsedCandidate parsed = parse_candidate_completion(completion);
                SupervisionCandidate candidate;
                candidate.payload.id = id;
                candidate.payload.context = context;
                candidate.payload.pair = pair;
                candidate.payload.additional_sentence = parsed.additional_sentence;
                candidate.payload.direction = direction;
                candidate.payload.explanation = parsed.explanation;
                candidate.payload.split = Split::train;
                candidate.payload.validate(/*check_substring=*/false);
                candidate.provenance = {client.model_id(), tmpl.id, timestamp};
                return candidate;
            } catch (const ParseError& e) {
                last_error = e.what();
            } catch (const ValidationError& e) {
                last_error = e.what();
            }
        }
    }
    throw ParseError("candidate generation exhausted retries: " + last_error);
}

std::string render_exp_only_prompt(const PromptTemplate& tmpl,
                                   const DiffInstance& instance) {
    std::string prompt = tmpl.render({{"context", instance.context},
                                      {"e1", instance.pair.e1},
                                      {"relation", to_string(instance.direction)},
                                      {"e2", instance.pair.e2}});
    // The sentence is already chosen; the completion picks up at the
    // explanation line.
    prompt += "\n" + instance.additional_sentence + "\nExplanation:";
    return prompt;
}

std::string mine_negative_explanation(const DiffInstance& instance,
                                      CompletionClient& client,
                                      const PromptTemplate& tmpl,
                                      const SimilarityModel& similarity,
                                      int k, std::string* warning) {
    if (!instance.explanation) {
        throw Error("instance '" + instance.id + "' has no human explanation");
    }
    if (k < 1) throw Error("k must be >= 1");

    std::string prompt = render_exp_only_prompt(tmpl, instance);
    auto completions = client.complete(prompt, k);
    std::string best;
    double best_sim = 2.0;
    size_t parsed = 0;
    for (const auto& completion : completions) {
        auto lines = non_empty_lines(completion);
        if (lines.empty()) continue;
        std::string text = join(lines, " ");
        if (starts_with(text, "Explanation:")) text = trim(text.substr(12));
        if (text.empty()) continue;
        ++parsed;
        double sim = similarity.similarity(text, *instance.explanation);
        if (sim < best_sim) {
            best_sim = sim;
            best = text;
        }
    }
    if (parsed == 0) {
        throw ParseError("no parseable negative explanation for '" +
                         instance.id + "'");
    }
    if (warning && best_sim >= 0.999) {
        *warning = "mined negative is near-identical to the human explanation "
                   "(similarity " + std::to_string(best_sim) + ")";
    }
    return best;
}

CandidateJudge make_cascade_judge(const CascadeCheckpoints& checkpoints,
                                  const std::vector<VerifierStage>& order) {
    return [checkpoints, order](SupervisionCandidate& candidate) {
        std::vector<SupervisionCandidate> one;
        one.push_back(candidate);
        CascadeResult result = run_cascade(std::move(one), checkpoints, order);
        bool accepted = !result.accepted.empty();
        candidate.verdicts.clear();
        for (const auto& [id, verdict] : result.audit) {
            candidate.verdicts.push_back(verdict);
        }
        return accepted;
    };
}

std::string serialize_candidate(const SupervisionCandidate& candidate) {
    nlohmann::ordered_json rec =
        nlohmann::ordered_json::parse(serialize(candidate.payload));
    rec["generator_model"] = candidate.provenance.generator_model;
    rec["prompt_id"] = candidate.provenance.prompt_id;
    rec["timestamp"] = candidate.provenance.timestamp;
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
    for (const auto& v : candidate.verdicts) {
        nlohmann::ordered_json row;
        row["stage"] = to_string(v.stage);
        row["passed"] = v.passed;
        row["score"] = v.score;
        if (!v.detail.empty()) row["detail"] = v.detail;
        verdicts.push_back(row);
    }
    rec["verdicts"] = verdicts;
    return rec.dump();
}

SupervisionCandidate parse_candidate(const std::string& line) {
    auto rec = nlohmann::json::parse(line);
    SupervisionCandidate candidate;
    candidate.payload.id = rec.at("id").get<std::string>();
    candidate.payload.context = rec.at("context").get<std::string>();
    candidate.payload.pair.e1 = rec.at("e1").get<std::string>();
    candidate.payload.pair.e2 = rec.at("e2").get<std::string>();
    candidate.payload.additional_sentence =
        rec.at("additional_sentence").get<std::string>();
    candidate.payload.direction =
        relation_from_string(rec.at("direction").get<std::string>());
    if (rec.contains("explanation")) {
        candidate.payload.explanation = rec["explanation"].get<std::string>();
    }
    candidate.payload.split = split_from_string(rec.at("split").get<std::string>());
    candidate.provenance.generator_model =
        rec.at("generator_model").get<std::string>();
    candidate.provenance.prompt_id = rec.at("prompt_id").get<std::string>();
    candidate.provenance.timestamp = rec.at("timestamp").get<std::string>();
    for (const auto& row : rec.at("verdicts")) {
        VerifierVerdict v;
        v.stage = verifier_stage_from_string(row.at("stage").get<std::string>());
        v.passed = row.at("passed").get<bool>();
        v.score = row.at("score").get<double>();
        if (row.contains("detail")) v.detail = row["detail"].get<std::string>();
        candidate.verdicts.push_back(v);
    }
    candidate.validate();
    return candidate;
}

namespace {

struct ResumeState {
    std::vector<SupervisionCandidate> accepted;
    long last_context_index = -1;  // derived from audited candidate ids
};

// Candidate ids encode the generation coordinates: gen-<seed>-<ctx>-<dir>.
std::string candidate_id(uint64_t seed, size_t ctx_index, Relation direction) {
    return "gen-" + std::to_string(seed) + "-" + std::to_string(ctx_index) +
           "-" + to_string(direction);
}

long context_index_from_id(const std::string& id, uint64_t seed) {
    const std::string prefix = "gen-" + std::to_string(seed) + "-";
    if (!starts_with(id, prefix)) return -1;
    size_t start = prefix.size();
    size_t end = id.find('-', start);
    if (end == std::string::npos) return -1;
    try {
        return std::stol(id.substr(start, end - start));
    } catch (const std::exception&) {
        return -1;
    }
}

ResumeState load_resume_state(const fs::path& out_dir, uint64_t seed) {
    ResumeState state;
    std::ifstream accepted_in(out_dir / "accepted.jsonl");
    if (accepted_in) {
        std::string line;
        while (std::getline(accepted_in, line)) {
            if (line.empty()) continue;
            state.accepted.push_back(parse_candidate(line));
        }
    }
    std::ifstream audit_in(out_dir / "audit.jsonl");
    if (audit_in) {
        std::string line;
        while (std::getline(audit_in, line)) {
            if (line.empty()) continue;
            auto [id, verdict] = parse_audit_row(line);
            state.last_context_index =
                std::max(state.last_context_index, context_index_from_id(id, seed));
        }
    }
    return state;
}

}  // namespace

MockCompletionClient::Handler canned_completion_handler() {
    return [](const std::string& prompt, int n) {
        static const char* kSubjects[] = {
            "The neighbors", "A quiet helper", "The youngest cousin",
            "The shop owner", "An old friend", "The night watchman"};
        static const char* kVerbs[] = {
            "noticed the change early",   "kept the secret for weeks",
            "made a careful plan",        "hoped for a better outcome",
            "doubted the whole scheme",   "remembered an earlier promise"};
        static const char* kSentences[] = {
            "Word of the preparations had spread long in advance.",
            "Nobody involved wanted to repeat last year's mistake.",
            "A handwritten note had set everything in motion.",
            "Old habits in that household died hard.",
            "The whole plan depended on perfect timing.",
            "Few people knew how long this had been coming."};
        static const char* kReasons[] = {
            "an early start usually means the groundwork came first",
            "a promise made beforehand explains the later outcome",
            "habits formed over years shape what happens next",
            "the reaction described could only follow the event itself",
            "preparation of that kind points to an earlier decision",
            "such consequences tend to arrive only afterwards"};

        size_t h = std::hash<std::string>{}(prompt);
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) {
            size_t k = h + static_cast<size_t>(i) * 0x9e3779b9ULL;
            if (prompt.find("unmentioned") != std::string::npos) {
                // Event-pair shape: phrase line, then its antecedent.
                size_t ctx_pos = prompt.rfind("Context: ");
                std::string context_line;
                if (ctx_pos != std::string::npos) {
                    size_t start = ctx_pos + 9;
                    size_t end = prompt.find('\n', start);
                    context_line = prompt.substr(start, end - start);
                }
                auto sentences = split_sentences(context_line);
                std::string antecedent =
                    sentences.empty() ? "the story so far." : sentences.front();
                out.push_back(std::string(kSubjects[k % 6]) + " " +
                              kVerbs[(k / 6) % 6] + "\nIt can be inferred from " +
                              antecedent);
            } else if (prompt.size() >= 12 &&
                       prompt.compare(prompt.size() - 12, 12, "Explanation:") == 0) {
                // Exp-only continuation.
                out.push_back(std::string(" because ") + kReasons[k % 6]);
            } else {
                out.push_back(std::string(kSentences[k % 6]) + "\nExplanation: this holds because " +
                              kReasons[(k / 6) % 6] + ".");
            }
        }
        return out;
    };
}

DistillResult distill(const std::vector<std::string>& contexts,
                      const DistillConfig& config, CompletionClient& client,
                      const PromptTemplate& event_pair_prompt,
                      const PromptTemplate& candidate_prompt,
                      const CandidateJudge& judge) {
    config.policy.validate();
    if (config.out_dir.empty()) throw Error("distill requires an output directory");
    fs::create_directories(config.out_dir);
    fs::path out_dir(config.out_dir);

    auto timestamp_fn =
        config.timestamp_fn ? config.timestamp_fn : default_timestamp;

    ResumeState state = load_resume_state(out_dir, config.seed);
    DistillResult result;
    result.accepted = state.accepted;

    if (config.target_accepted <= 0 ||
        static_cast<int>(result.accepted.size()) >= config.target_accepted) {
        return result;
    }

    // Seeded shuffle fixes the context order for the whole run, so a resume
    // replays the identical stream from the next unprocessed index.
    std::vector<size_t> order(contexts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::ofstream accepted_out(out_dir / "accepted.jsonl", std::ios::app);
    std::ofstream audit_out(out_dir / "audit.jsonl", std::ios::app);
    if (!accepted_out || !audit_out) {
        throw Error("cannot open distill output files in " + config.out_dir);
    }

    for (size_t ctx_index = static_cast<size_t>(state.last_context_index + 1);
         ctx_index < order.size(); ++ctx_index) {
        if (static_cast<int>(result.accepted.size()) >= config.target_accepted ||
            static_cast<int>(result.candidates_attempted) >=
                config.policy.max_candidates) {
            break;
        }
        const std::string& context = contexts[order[ctx_index]];
        ++result.contexts_consumed;

        EventPair pair;
        try {
            pair = generate_event_pair(context, client, event_pair_prompt,
                                       config.policy);
        } catch (const ParseError&) {
            continue;  // context yields nothing; the index is still consumed
        }

        for (Relation direction : {Relation::before, Relation::after}) {
            std::string id = candidate_id(config.seed, ctx_index, direction);
            SupervisionCandidate candidate;
            try {
                candidate = generate_candidate(context, pair, direction, client,
                                               candidate_prompt, config.policy,
                                               id, timestamp_fn());
            } catch (const ParseError&) {
                continue;
            }
            ++result.candidates_attempted;
            bool accepted = judge(candidate);
            for (const auto& verdict : candidate.verdicts) {
                audit_out << serialize_audit_row(candidate.payload.id, verdict)
                          << '\n';
            }
            if (accepted) {
                accepted_out << serialize_candidate(candidate) << '\n';
                result.accepted.push_back(std::move(candidate));
            }
        }
        audit_out.flush();
        accepted_out.flush();
    }
    return result;
}

}  // namespace tempdiff
