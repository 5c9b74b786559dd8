#pragma once

#include <map>
#include <optional>
#include <string>

#include "tempdiff/completion.hpp"
#include "tempdiff/scorer.hpp"
#include "tempdiff/trainer.hpp"

namespace tempdiff {

// Minimal INI reader: [section] headers, key = value lines, # comments.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    std::optional<std::string> get(const std::string& section,
                                   const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// [scorer] section; TEMPDIFF_DEVICE overrides the device hint.
BackendConfig backend_config_from(const ConfigFile& config);

// [llm] section.
LlmConfig llm_config_from(const ConfigFile& config);

// [train] section.
TrainConfig train_config_from(const ConfigFile& config);

}  // namespace tempdiff
