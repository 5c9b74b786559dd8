#include "tempdiff/scorer.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tempdiff/error.hpp"
#include "tempdiff/seq2seq.hpp"

namespace tempdiff {

void ScorerOutput::validate() const {
    if (!(p_ent >= 0.0 && p_ent <= 1.0 && p_con >= 0.0 && p_con <= 1.0)) {
        throw ValidationError("scorer probabilities out of [0,1]");
    }
    if (std::fabs(p_ent + p_con - 1.0) > 1e-6) {
        throw ValidationError("scorer probabilities sum to " +
                              std::to_string(p_ent + p_con) + ", expected 1");
    }
}

void BackendConfig::validate() const {
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (max_input_length < 16) throw ValidationError("max_input_length must be >= 16");
}

std::vector<ScorerOutput> Backend::batch_score(
    const std::vector<EntailmentExample>& examples) {
    std::vector<ScorerOutput> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(score(ex));
    return out;
}

std::string mock_table_key(const std::string& premise,
                           const std::string& hypothesis) {
    return premise + "\x1f" + hypothesis;
}

std::unique_ptr<MockBackend> MockBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mock table: " + path);
    auto backend = std::make_unique<MockBackend>();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("premise") ||
            !rec.contains("hypothesis") || !rec.contains("p_ent")) {
            throw LoadError(path, lineno,
                            "expected fields premise, hypothesis, p_ent");
        }
        backend->set_score(rec["premise"].get<std::string>(),
                           rec["hypothesis"].get<std::string>(),
                           rec["p_ent"].get<double>());
    }
    return backend;
}

void MockBackend::set_score(const std::string& premise,
                            const std::string& hypothesis, double p_ent) {
    if (!(p_ent >= 0.0 && p_ent <= 1.0)) {
        throw ValidationError("mock p_ent out of [0,1]: " + std::to_string(p_ent));
    }
    table_[mock_table_key(premise, hypothesis)] = p_ent;
}

ScorerOutput MockBackend::score(const EntailmentExample& example) {
    auto it = table_.find(mock_table_key(example.premise, example.hypothesis));
    double p_ent = it == table_.end() ? 0.5 : it->second;
    return ScorerOutput{p_ent, 1.0 - p_ent};
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    switch (config.kind) {
        case BackendKind::mock:
            if (config.model.empty()) return std::make_unique<MockBackend>();
            return MockBackend::from_file(config.model);
        case BackendKind::seq2seq:
            return Seq2SeqBackend::open(config);
    }
    throw Error("unknown backend kind");
}

}  // namespace tempdiff
