#pragma once

#include <atomic>
#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "finlm/errors.hpp"
#include "finlm/generation.hpp"
#include "finlm/util.hpp"

namespace finlm::gen {

struct RetryPolicy {
    int max_attempts = 3;            // total attempts, including the first
    int initial_backoff_ms = 100;
    double backoff_factor = 2.0;
    int timeout_ms = 30000;
    util::LogFn log = util::stderr_log();
};

namespace detail {

inline std::atomic<std::uint64_t> request_counter{0};

inline std::string next_request_id() {
    return "req-" + std::to_string(request_counter.fetch_add(1) + 1);
}

}  // namespace detail

// POSTs {prompt, max_new_tokens, sampling, top_k, repetition_penalty} to the
// endpoint and expects {"text": ...}. Transport errors and 5xx responses are
// retried with exponential backoff up to the attempt budget; 4xx and
// malformed bodies raise ProtocolError immediately.
inline std::string http_generate(const std::string& endpoint, const std::string& path,
                                 const std::string& prompt, const GenerationConfig& config,
                                 const RetryPolicy& policy = {}, const std::string& auth_token = {}) {
    validate(config);
    if (policy.max_attempts < 1) throw Error(ErrorCode::BackendUnavailable, "attempt budget is zero");

    nlohmann::json body{{"prompt", prompt},
                        {"max_new_tokens", config.max_new_tokens},
                        {"sampling", config.sampling},
                        {"top_k", config.top_k},
                        {"repetition_penalty", config.repetition_penalty}};
    const std::string payload = body.dump();

    std::string last_failure = "no attempt made";
    int backoff_ms = policy.initial_backoff_ms;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms = static_cast<int>(backoff_ms * policy.backoff_factor);
        }
        std::string request_id = detail::next_request_id();
        policy.log("http_generate " + request_id + " attempt " + std::to_string(attempt) + " -> " + endpoint);

        httplib::Client client(endpoint);
        client.set_connection_timeout(policy.timeout_ms / 1000, (policy.timeout_ms % 1000) * 1000);
        client.set_read_timeout(policy.timeout_ms / 1000, (policy.timeout_ms % 1000) * 1000);
        httplib::Headers headers{{"X-Request-Id", request_id}};
        if (!auth_token.empty()) headers.emplace("Authorization", "Bearer " + auth_token);

        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_failure = request_id + ": transport error (" + httplib::to_string(res.error()) + ")";
            policy.log("http_generate " + last_failure);
            continue;
        }
        if (res->status >= 500) {
            last_failure = request_id + ": server status " + std::to_string(res->status);
            policy.log("http_generate " + last_failure);
            continue;
        }
        if (res->status != 200)
            throw Error(ErrorCode::ProtocolError,
                        request_id + ": unexpected status " + std::to_string(res->status));
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::ProtocolError, request_id + ": response is not valid JSON");
        }
        if (!parsed.is_object() || !parsed.contains("text") || !parsed.at("text").is_string())
            throw Error(ErrorCode::ProtocolError, request_id + ": response missing text field");
        return parsed.at("text").get<std::string>();
    }
    throw Error(ErrorCode::BackendUnavailable,
                "budget of " + std::to_string(policy.max_attempts) + " attempts exhausted; last: " + last_failure);
}

class HttpBackend final : public GenerationBackend {
public:
    HttpBackend(std::string endpoint, std::string path = "/generate", RetryPolicy policy = {},
                std::string auth_token = {})
        : endpoint_(std::move(endpoint)), path_(std::move(path)), policy_(std::move(policy)),
          auth_token_(std::move(auth_token)) {}

    std::string generate(const std::string& prompt, const GenerationConfig& config) override {
        return http_generate(endpoint_, path_, prompt, config, policy_, auth_token_);
    }

    std::string identity() const override { return "http:" + endpoint_ + path_; }

private:
    std::string endpoint_;
    std::string path_;
    RetryPolicy policy_;
    std::string auth_token_;
};

}  // namespace finlm::gen
