#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "finlm/errors.hpp"
#include "finlm/tokenizer.hpp"

namespace finlm::train {

// Log-bilinear next-token model: logits(next | prev) = W * E[prev] + b.
// Small enough to train on a CPU core, rich enough to exercise the full
// schedule / loss / gradient machinery. All math in double precision.
class TinyLM {
public:
    TinyLM() = default;

    TinyLM(TokenId vocab_size, std::size_t dim, std::uint64_t seed,
           std::optional<TokenId> eot_id = std::nullopt)
        : vocab_(static_cast<std::size_t>(vocab_size)), dim_(dim), eot_id_(eot_id) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, 0.1);
        embedding_.resize(vocab_ * dim_);
        projection_.resize(vocab_ * dim_);
        bias_.assign(vocab_, 0.0);
        for (auto& v : embedding_) v = dist(rng);
        for (auto& v : projection_) v = dist(rng);
    }

    std::size_t vocab_size() const { return vocab_; }
    std::size_t dim() const { return dim_; }
    std::optional<TokenId> eot_id() const { return eot_id_; }
    std::size_t param_count() const { return 2 * vocab_ * dim_ + vocab_; }

    std::vector<double>& embedding() { return embedding_; }
    std::vector<double>& projection() { return projection_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& embedding() const { return embedding_; }
    const std::vector<double>& projection() const { return projection_; }
    const std::vector<double>& bias() const { return bias_; }

    bool operator==(const TinyLM&) const = default;

    // Unnormalized scores for the token following `prev`.
    std::vector<double> logits(TokenId prev) const {
        check_token(prev);
        std::vector<double> out(bias_);
        const double* h = embedding_.data() + static_cast<std::size_t>(prev) * dim_;
        for (std::size_t v = 0; v < vocab_; ++v) {
            const double* w = projection_.data() + v * dim_;
            double dot = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) dot += w[k] * h[k];
            out[v] += dot;
        }
        return out;
    }

    std::vector<double> probabilities(TokenId prev) const {
        std::vector<double> p = logits(prev);
        double mx = p[0];
        for (double v : p) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : p) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : p) v /= sum;
        return p;
    }

    struct Gradients {
        std::vector<double> embedding;
        std::vector<double> projection;
        std::vector<double> bias;
    };

    Gradients zero_gradients() const {
        return {std::vector<double>(vocab_ * dim_, 0.0), std::vector<double>(vocab_ * dim_, 0.0),
                std::vector<double>(vocab_, 0.0)};
    }

    // Accumulates cross-entropy loss and gradients for one (prev -> next)
    // pair. Returns the position loss; gradients are summed into `grad`.
    double accumulate_pair(TokenId prev, TokenId next, Gradients& grad) const {
        check_token(prev);
        check_token(next);
        std::vector<double> logit = logits(prev);
        double mx = logit[0];
        for (double v : logit) mx = std::max(mx, v);
        double sum = 0.0;
        for (double v : logit) sum += std::exp(v - mx);
        double log_z = mx + std::log(sum);
        double loss = log_z - logit[static_cast<std::size_t>(next)];

        const double* h = embedding_.data() + static_cast<std::size_t>(prev) * dim_;
        double* dh = grad.embedding.data() + static_cast<std::size_t>(prev) * dim_;
        for (std::size_t v = 0; v < vocab_; ++v) {
            double p = std::exp(logit[v] - log_z);
            double d = p - (static_cast<TokenId>(v) == next ? 1.0 : 0.0);
            grad.bias[v] += d;
            const double* w = projection_.data() + v * dim_;
            double* dw = grad.projection.data() + v * dim_;
            for (std::size_t k = 0; k < dim_; ++k) {
                dw[k] += d * h[k];
                dh[k] += d * w[k];
            }
        }
        return loss;
    }

    // Mean loss and mean gradients over a list of token sequences. Positions
    // t predict t+1 within each sequence; `skip` marks target positions to
    // exclude (document-boundary masking).
    struct BatchResult {
        double loss = 0.0;
        std::size_t positions = 0;
        Gradients grad;
    };

    BatchResult batch_loss_and_grad(
        const std::vector<std::span<const TokenId>>& sequences,
        const std::vector<std::vector<bool>>& skip_targets = {}) const {
        BatchResult result;
        result.grad = zero_gradients();
        double total = 0.0;
        for (std::size_t s = 0; s < sequences.size(); ++s) {
            const auto& seq = sequences[s];
            for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
                if (s < skip_targets.size() && t + 1 < skip_targets[s].size() && skip_targets[s][t + 1])
                    continue;
                total += accumulate_pair(seq[t], seq[t + 1], result.grad);
                ++result.positions;
            }
        }
        if (result.positions > 0) {
            double inv = 1.0 / static_cast<double>(result.positions);
            result.loss = total * inv;
            for (double& g : result.grad.embedding) g *= inv;
            for (double& g : result.grad.projection) g *= inv;
            for (double& g : result.grad.bias) g *= inv;
        }
        return result;
    }

    void apply_update(const Gradients& grad, double lr) {
        for (std::size_t i = 0; i < embedding_.size(); ++i) embedding_[i] -= lr * grad.embedding[i];
        for (std::size_t i = 0; i < projection_.size(); ++i) projection_[i] -= lr * grad.projection[i];
        for (std::size_t i = 0; i < bias_.size(); ++i) bias_[i] -= lr * grad.bias[i];
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"vocab_size", vocab_},
                         {"dim", dim_},
                         {"embedding", embedding_},
                         {"projection", projection_},
                         {"bias", bias_}};
        if (eot_id_) j["eot_id"] = *eot_id_;
        return j;
    }

    static TinyLM from_json(const nlohmann::json& j) {
        TinyLM m;
        m.vocab_ = j.at("vocab_size").get<std::size_t>();
        m.dim_ = j.at("dim").get<std::size_t>();
        m.embedding_ = j.at("embedding").get<std::vector<double>>();
        m.projection_ = j.at("projection").get<std::vector<double>>();
        m.bias_ = j.at("bias").get<std::vector<double>>();
        if (j.contains("eot_id")) m.eot_id_ = j.at("eot_id").get<TokenId>();
        if (m.embedding_.size() != m.vocab_ * m.dim_ || m.projection_.size() != m.vocab_ * m.dim_ ||
            m.bias_.size() != m.vocab_)
            throw Error(ErrorCode::ParseError, "model tensor sizes do not match vocab/dim");
        return m;
    }

private:
    void check_token(TokenId id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab_)
            throw Error(ErrorCode::DimensionMismatch,
                        "token id " + std::to_string(id) + " outside vocab of " + std::to_string(vocab_));
    }

    std::size_t vocab_ = 0;
    std::size_t dim_ = 0;
    std::optional<TokenId> eot_id_;
    std::vector<double> embedding_;
    std::vector<double> projection_;
    std::vector<double> bias_;
};

}  // namespace finlm::train
