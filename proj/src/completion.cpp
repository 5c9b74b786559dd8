#include "tempdiff/completion.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace tempdiff {

void GenerationPolicy::validate() const {
    if (completions_per_request < 1) {
        throw ValidationError("completions_per_request must be >= 1");
    }
    if (max_candidates < 1) throw ValidationError("max_candidates must be >= 1");
    if (retry_budget < 0) throw ValidationError("retry_budget must be >= 0");
}

void MockCompletionClient::set_response(const std::string& prompt,
                                        std::vector<std::string> completions) {
    canned_[prompt] = std::move(completions);
}

std::vector<std::string> MockCompletionClient::complete(
    const std::string& prompt, int n) {
    ++calls_;
    auto it = canned_.find(prompt);
    if (it != canned_.end()) {
        auto out = it->second;
        if (static_cast<int>(out.size()) > n) out.resize(static_cast<size_t>(n));
        return out;
    }
    if (handler_) return handler_(prompt, n);
    throw ClientError("no canned response for prompt");
}

HttpCompletionClient::HttpCompletionClient(LlmConfig config,
                                           GenerationPolicy policy)
    : config_(std::move(config)), policy_(std::move(policy)) {
    policy_.validate();
    if (const char* key = std::getenv("TEMPDIFF_LLM_KEY")) api_key_ = key;
}

std::vector<std::string> HttpCompletionClient::complete(
    const std::string& prompt, int n) {
    nlohmann::json body;
    body["model"] = config_.model;
    body["prompt"] = prompt;
    body["n"] = n;
    body["temperature"] = policy_.temperature;
    body["max_tokens"] = config_.max_tokens;
    const std::string payload = body.dump();

    httplib::Client client(config_.endpoint);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }

    std::string last_error;
    for (int attempt = 0; attempt <= policy_.retry_budget; ++attempt) {
        if (attempt > 0) {
            size_t slot = static_cast<size_t>(attempt - 1);
            if (slot < policy_.backoff.size()) {
                std::this_thread::sleep_for(policy_.backoff[slot]);
            }
        }
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "network error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw ClientError("completion request failed with status " +
                              std::to_string(res->status));
        }
        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices")) {
            throw ClientError("malformed completion response");
        }
        std::vector<std::string> out;
        for (const auto& choice : parsed["choices"]) {
            out.push_back(choice.at("text").get<std::string>());
        }
        return out;
    }
    throw ClientError("completion request exhausted retries: " + last_error);
}

}  // namespace tempdiff
