#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "finlm/errors.hpp"
#include "finlm/generation.hpp"
#include "finlm/tiny_lm.hpp"
#include "finlm/tokenizer.hpp"
#include "finlm/util.hpp"

namespace finlm::gen {

// Penalizes already-seen tokens: positive logits are divided by the penalty,
// non-positive logits multiplied, so the sign never flips. penalty 1.0 is the
// identity.
inline std::vector<double> apply_repetition_penalty(std::vector<double> logits,
                                                    const std::unordered_set<TokenId>& seen_tokens,
                                                    double penalty) {
    if (penalty <= 0) throw Error(ErrorCode::DomainError, "penalty must be > 0");
    for (TokenId id : seen_tokens) {
        if (id < 0 || static_cast<std::size_t>(id) >= logits.size())
            throw Error(ErrorCode::DimensionMismatch,
                        "seen token " + std::to_string(id) + " outside logits of size " +
                            std::to_string(logits.size()));
        double& v = logits[static_cast<std::size_t>(id)];
        v = v > 0 ? v / penalty : v * penalty;
    }
    return logits;
}

// Keeps the k largest entries (ties broken toward lower index) and sets the
// rest to -infinity. k >= size is the identity.
inline std::vector<double> top_k_filter(std::vector<double> logits, std::size_t k) {
    if (k < 1) throw Error(ErrorCode::DomainError, "k must be >= 1");
    if (k >= logits.size()) return logits;
    std::vector<std::size_t> order(logits.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });
    std::vector<bool> keep(logits.size(), false);
    for (std::size_t i = 0; i < k; ++i) keep[order[i]] = true;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (!keep[i]) logits[i] = -std::numeric_limits<double>::infinity();
    return logits;
}

inline TokenId argmax_lowest_index(const std::vector<double>& logits) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return static_cast<TokenId>(best);
}

// Greedy decoding with repetition penalty over all prompt and generated
// tokens. Returns the generated continuation; stops after max_new_tokens or
// when the model's end-of-text token is emitted (included in the output).
inline std::vector<TokenId> greedy_decode(const train::TinyLM& model,
                                          const std::vector<TokenId>& prompt_ids,
                                          const GenerationConfig& config) {
    validate(config);
    if (prompt_ids.empty()) throw Error(ErrorCode::EmptyInput, "prompt is empty");

    std::unordered_set<TokenId> seen(prompt_ids.begin(), prompt_ids.end());
    std::vector<TokenId> generated;
    TokenId prev = prompt_ids.back();
    for (int i = 0; i < config.max_new_tokens; ++i) {
        std::vector<double> logits = model.logits(prev);
        logits = apply_repetition_penalty(std::move(logits), seen, config.repetition_penalty);
        logits = top_k_filter(std::move(logits), static_cast<std::size_t>(config.top_k));
        TokenId next = argmax_lowest_index(logits);
        generated.push_back(next);
        seen.insert(next);
        prev = next;
        if (model.eot_id() && next == *model.eot_id()) break;
    }
    return generated;
}

// GenerationBackend over a TinyLM and tokenizer.
class ReferenceBackend final : public GenerationBackend {
public:
    ReferenceBackend(std::string name, train::TinyLM model, std::shared_ptr<const Tokenizer> tokenizer)
        : name_(std::move(name)), model_(std::move(model)), tokenizer_(std::move(tokenizer)) {}

    std::string generate(const std::string& prompt, const GenerationConfig& config) override {
        std::vector<TokenId> ids = tokenizer_->encode(prompt);
        if (ids.empty()) throw Error(ErrorCode::EmptyInput, "prompt is empty");
        // byte-level decoding can land mid-codepoint; keep the output valid text
        return util::sanitize_utf8(tokenizer_->decode(greedy_decode(model_, ids, config)));
    }

    std::string identity() const override { return name_; }
    const train::TinyLM& model() const { return model_; }

private:
    std::string name_;
    train::TinyLM model_;
    std::shared_ptr<const Tokenizer> tokenizer_;
};

}  // namespace finlm::gen
