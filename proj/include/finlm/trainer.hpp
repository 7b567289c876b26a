#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "finlm/errors.hpp"
#include "finlm/loss_curve.hpp"
#include "finlm/packing.hpp"
#include "finlm/schedule.hpp"
#include "finlm/tiny_lm.hpp"
#include "finlm/train_plan.hpp"

namespace finlm::train {

struct TrainOptions {
    std::size_t model_dim = 16;
    TokenId vocab_size = 257;  // byte tokenizer ids + end-of-text
    // When set, positions whose target starts a new packed document are
    // excluded from the loss.
    bool mask_document_boundaries = false;
};

struct TrainResult {
    TinyLM model;
    LossCurve curve;
    std::uint64_t total_steps = 0;
};

// Reference trainer: plain SGD over cross-entropy next-token loss with the
// plan's linear-to-zero schedule. Batches walk the packed sequences in input
// order, global_batch sequences per step, epochs passes over the data. The
// curve records one entry per optimizer step plus a final evaluation entry at
// lr 0, so the recorded schedule ends exactly at zero. Deterministic for a
// fixed (data, plan, seed).
inline TrainResult train_reference(const std::vector<PackedSequence>& packed, const TrainPlan& plan,
                                   std::uint64_t seed, const TrainOptions& options = {}) {
    validate(plan);
    if (packed.empty()) throw Error(ErrorCode::EmptyInput, "no packed sequences");

    const std::size_t nseq = packed.size();
    const std::size_t batch_size = static_cast<std::size_t>(plan.global_batch);
    const std::size_t batches_per_epoch = (nseq + batch_size - 1) / batch_size;
    const std::uint64_t total_steps =
        static_cast<std::uint64_t>(plan.epochs) * static_cast<std::uint64_t>(batches_per_epoch);

    TrainResult result;
    result.total_steps = total_steps;
    result.model = TinyLM(options.vocab_size, options.model_dim, seed, ByteTokenizer::kEot);

    // Pre-slice spans and boundary masks once; they are immutable during
    // training.
    std::vector<std::span<const TokenId>> spans(nseq);
    std::vector<std::vector<bool>> skips(nseq);
    for (std::size_t s = 0; s < nseq; ++s) {
        const auto& seq = packed[s];
        spans[s] = std::span<const TokenId>(seq.token_ids.data(), seq.non_pad_length());
        if (options.mask_document_boundaries) {
            skips[s].assign(seq.non_pad_length(), false);
            for (std::size_t b : seq.segment_boundaries) {
                if (b > 0 && b < skips[s].size()) skips[s][b] = true;
            }
        }
    }

    auto batch_views = [&](std::size_t batch_index) {
        std::size_t begin = batch_index * batch_size;
        std::size_t end = std::min(begin + batch_size, nseq);
        std::vector<std::span<const TokenId>> views(spans.begin() + static_cast<std::ptrdiff_t>(begin),
                                                    spans.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<std::vector<bool>> masks;
        if (options.mask_document_boundaries)
            masks.assign(skips.begin() + static_cast<std::ptrdiff_t>(begin),
                         skips.begin() + static_cast<std::ptrdiff_t>(end));
        return std::make_pair(std::move(views), std::move(masks));
    };

    for (std::uint64_t step = 0; step <= total_steps; ++step) {
        std::size_t batch_index = static_cast<std::size_t>(step % batches_per_epoch);
        auto [views, masks] = batch_views(batch_index);
        auto batch = result.model.batch_loss_and_grad(views, masks);
        if (!std::isfinite(batch.loss))
            throw Error(ErrorCode::NonFiniteLoss, "non-finite loss at step " + std::to_string(step));
        double lr = lr_at(step, total_steps, plan.lr_init);
        result.curve.entries.push_back({step, lr, batch.loss});
        if (step < total_steps && lr != 0.0) result.model.apply_update(batch.grad, lr);
    }
    return result;
}

// Mean recorded loss over one epoch's optimizer steps (0-based epoch index).
// The final evaluation entry belongs to no epoch.
inline double epoch_mean_loss(const LossCurve& curve, std::uint64_t total_steps, int epochs, int epoch) {
    if (epochs < 1 || epoch < 0 || epoch >= epochs)
        throw Error(ErrorCode::DomainError, "epoch index out of range");
    std::uint64_t per_epoch = total_steps / static_cast<std::uint64_t>(epochs);
    std::uint64_t begin = per_epoch * static_cast<std::uint64_t>(epoch);
    std::uint64_t end = begin + per_epoch;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : curve.entries) {
        if (e.step >= begin && e.step < end) {
            sum += e.loss;
            ++n;
        }
    }
    if (n == 0) throw Error(ErrorCode::DomainError, "no entries in epoch");
    return sum / static_cast<double>(n);
}

}  // namespace finlm::train
