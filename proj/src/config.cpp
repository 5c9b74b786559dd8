#include "tempdiff/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tempdiff/error.hpp"
#include "tempdiff/text.hpp"

namespace tempdiff {

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw Error("config line " + std::to_string(lineno) +
                            ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(lineno) +
                        ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw Error("config line " + std::to_string(lineno) + ": empty key");
        }
        out.sections_[section][key] = value;
    }
    return out;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return std::nullopt;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    return kit->second;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return get(section, key).value_or(fallback);
}

namespace {

int to_int(const std::string& value, const std::string& what) {
    try {
        return std::stoi(value);
    } catch (const std::exception&) {
        throw Error("config value for " + what + " is not an integer: " + value);
    }
}

double to_double(const std::string& value, const std::string& what) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw Error("config value for " + what + " is not a number: " + value);
    }
}

}  // namespace

BackendConfig backend_config_from(const ConfigFile& config) {
    BackendConfig out;
    std::string kind = config.get_or("scorer", "kind", "mock");
    if (kind == "mock") out.kind = BackendKind::mock;
    else if (kind == "seq2seq") out.kind = BackendKind::seq2seq;
    else throw Error("unknown scorer kind: '" + kind + "'");
    out.model = config.get_or("scorer", "model", "");
    out.max_input_length =
        to_int(config.get_or("scorer", "max_input_length", "256"),
               "scorer.max_input_length");
    out.batch_size =
        to_int(config.get_or("scorer", "batch_size", "8"), "scorer.batch_size");
    out.device = config.get_or("scorer", "device", "cpu");
    if (const char* device = std::getenv("TEMPDIFF_DEVICE")) {
        out.device = device;
    }
    out.validate();
    return out;
}

LlmConfig llm_config_from(const ConfigFile& config) {
    LlmConfig out;
    out.endpoint = config.get_or("llm", "endpoint", out.endpoint);
    out.path = config.get_or("llm", "path", out.path);
    out.model = config.get_or("llm", "model", out.model);
    out.max_tokens =
        to_int(config.get_or("llm", "max_tokens", "256"), "llm.max_tokens");
    out.timeout_seconds =
        to_int(config.get_or("llm", "timeout_seconds", "60"), "llm.timeout_seconds");
    return out;
}

TrainConfig train_config_from(const ConfigFile& config) {
    TrainConfig out;
    out.epsilon = to_double(config.get_or("train", "epsilon", "0.1"), "train.epsilon");
    out.alpha = to_double(config.get_or("train", "alpha", "10"), "train.alpha");
    out.steps = to_int(config.get_or("train", "steps", "50"), "train.steps");
    out.batch_size =
        to_int(config.get_or("train", "batch_size", "8"), "train.batch_size");
    if (auto ratio = config.get("train", "mix_ratio")) {
        out.mix_ratio = to_double(*ratio, "train.mix_ratio");
    }
    out.learning_rate = to_double(config.get_or("train", "learning_rate", "0.02"),
                                  "train.learning_rate");
    out.seed = static_cast<uint64_t>(
        to_int(config.get_or("train", "seed", "0"), "train.seed"));
    out.validate();
    return out;
}

}  // namespace tempdiff
