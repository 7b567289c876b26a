#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

#include "finlm/errors.hpp"

namespace finlm::gen {

// Decoding settings for generation-based evaluation and comparison runs.
// With sampling off, top_k never changes the argmax; it stays in the config
// for fidelity with the full-scale setup.
struct GenerationConfig {
    int max_new_tokens = 512;
    bool sampling = false;
    int top_k = 50;
    double repetition_penalty = 1.1;

    bool operator==(const GenerationConfig&) const = default;
};

inline void validate(const GenerationConfig& config) {
    if (config.max_new_tokens < 1) throw Error(ErrorCode::DomainError, "max_new_tokens must be >= 1");
    if (config.top_k < 1) throw Error(ErrorCode::DomainError, "top_k must be >= 1");
    if (config.repetition_penalty <= 0) throw Error(ErrorCode::DomainError, "repetition_penalty must be > 0");
}

inline nlohmann::json to_json(const GenerationConfig& c) {
    return nlohmann::json{{"max_new_tokens", c.max_new_tokens},
                          {"sampling", c.sampling},
                          {"top_k", c.top_k},
                          {"repetition_penalty", c.repetition_penalty}};
}

inline GenerationConfig generation_config_from_json(const nlohmann::json& j) {
    GenerationConfig c;
    c.max_new_tokens = j.value("max_new_tokens", c.max_new_tokens);
    c.sampling = j.value("sampling", c.sampling);
    c.top_k = j.value("top_k", c.top_k);
    c.repetition_penalty = j.value("repetition_penalty", c.repetition_penalty);
    validate(c);
    return c;
}

// Text-generation abstraction shared by the synthetic-data generator, the
// benchmark harness and the output comparer. Implementations must be safe
// for concurrent calls and, with sampling=false, deterministic.
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::string generate(const std::string& prompt, const GenerationConfig& config) = 0;
    virtual std::string identity() const = 0;
};

// Deterministic scripted backend for tests and offline runs.
class MockBackend final : public GenerationBackend {
public:
    using Responder = std::function<std::string(const std::string&, const GenerationConfig&)>;

    MockBackend(std::string name, Responder responder)
        : name_(std::move(name)), responder_(std::move(responder)) {}

    MockBackend(MockBackend&& other) noexcept
        : name_(std::move(other.name_)), responder_(std::move(other.responder_)),
          calls_(other.calls_.load()) {}

    static MockBackend fixed(std::string name, std::string response) {
        return MockBackend(std::move(name),
                           [r = std::move(response)](const std::string&, const GenerationConfig&) { return r; });
    }

    static MockBackend echo(std::string name) {
        return MockBackend(std::move(name),
                           [](const std::string& prompt, const GenerationConfig&) { return prompt; });
    }

    // Exact prompt -> response table; unknown prompts get `fallback`.
    static MockBackend from_map(std::string name, std::map<std::string, std::string> table,
                                std::string fallback = {}) {
        return MockBackend(std::move(name),
                           [table = std::move(table), fallback = std::move(fallback)](
                               const std::string& prompt, const GenerationConfig&) {
                               auto it = table.find(prompt);
                               return it == table.end() ? fallback : it->second;
                           });
    }

    // Fails every call; used to exercise failure budgets.
    static MockBackend failing(std::string name, std::string message = "mock failure") {
        return MockBackend(std::move(name),
                           [message = std::move(message)](const std::string&, const GenerationConfig&)
                               -> std::string { throw Error(ErrorCode::BackendUnavailable, message); });
    }

    std::string generate(const std::string& prompt, const GenerationConfig& config) override {
        calls_.fetch_add(1);
        return responder_(prompt, config);
    }

    std::string identity() const override { return name_; }
    std::uint64_t call_count() const { return calls_.load(); }

private:
    std::string name_;
    Responder responder_;
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace finlm::gen
