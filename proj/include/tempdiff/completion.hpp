#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tempdiff/error.hpp"

namespace tempdiff {

// Transport or quota failure from a completion service.
class ClientError : public Error {
public:
    explicit ClientError(const std::string& msg) : Error(msg) {}
};

// A completion came back in a shape the caller cannot use.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct GenerationPolicy {
    int completions_per_request = 1;
    double temperature = 1.0;
    int max_candidates = 10000;
    int retry_budget = 2;
    std::vector<std::chrono::milliseconds> backoff = {
        std::chrono::milliseconds(500), std::chrono::milliseconds(2000)};

    void validate() const;
};

// Text-completion service: prompt in, n completions out.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::vector<std::string> complete(const std::string& prompt, int n) = 0;
    virtual std::string model_id() const = 0;
};

// Offline client: exact-prompt canned responses, with an optional handler
// for prompts not in the table. Deterministic by construction.
class MockCompletionClient : public CompletionClient {
public:
    using Handler =
        std::function<std::vector<std::string>(const std::string& prompt, int n)>;

    explicit MockCompletionClient(Handler handler = nullptr)
        : handler_(std::move(handler)) {}

    void set_response(const std::string& prompt,
                      std::vector<std::string> completions);

    std::vector<std::string> complete(const std::string& prompt, int n) override;
    std::string model_id() const override { return "mock"; }

    size_t call_count() const { return calls_; }

private:
    std::map<std::string, std::vector<std::string>> canned_;
    Handler handler_;
    size_t calls_ = 0;
};

struct LlmConfig {
    std::string endpoint = "http://localhost:8080";
    std::string path = "/v1/completions";
    std::string model = "text-completion";
    int max_tokens = 256;
    int timeout_seconds = 60;
};

// HTTP client for an OpenAI-style completions endpoint. The credential
// comes from TEMPDIFF_LLM_KEY; retries transient failures per the policy's
// backoff schedule.
class HttpCompletionClient : public CompletionClient {
public:
    HttpCompletionClient(LlmConfig config, GenerationPolicy policy);

    std::vector<std::string> complete(const std::string& prompt, int n) override;
    std::string model_id() const override { return config_.model; }

private:
    LlmConfig config_;
    GenerationPolicy policy_;
    std::string api_key_;
};

}  // namespace tempdiff
