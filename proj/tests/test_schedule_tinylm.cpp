#include <catch_amalgamated.hpp>

#include <random>

#include "finlm/schedule.hpp"
#include "finlm/tiny_lm.hpp"
#include "oracles.hpp"

using namespace finlm;
using namespace finlm::train;

TEST_CASE("linear schedule is exact at the endpoints", "[schedule]") {
    CHECK(lr_at(0, 1000, 5e-7) == 5e-7);
    CHECK(lr_at(1000, 1000, 5e-7) == 0.0);
    CHECK(lr_at(500, 1000, 5e-7) == Catch::Approx(2.5e-7).epsilon(1e-12));
}

TEST_CASE("schedule rejects out-of-range steps", "[schedule]") {
    try {
        lr_at(11, 10, 1e-3);
        FAIL("expected DomainError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DomainError);
    }
    CHECK_THROWS_AS(lr_at(0, 0, 1e-3), Error);
}

TEST_CASE("schedule is non-increasing and affine", "[schedule]") {
    const std::uint64_t total = 777;
    double prev = lr_at(0, total, 3e-4);
    for (std::uint64_t s = 1; s <= total; ++s) {
        double lr = lr_at(s, total, 3e-4);
        CHECK(lr <= prev);
        prev = lr;
    }
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::uint64_t> step(0, total);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint64_t a = step(rng), b = step(rng);
        if ((a + b) % 2 != 0) continue;
        double lhs = lr_at(a, total, 3e-4) + lr_at(b, total, 3e-4);
        double rhs = 2.0 * lr_at((a + b) / 2, total, 3e-4);
        CHECK(lhs == Catch::Approx(rhs).margin(1e-18));
    }
}

TEST_CASE("tiny lm probabilities normalize to one", "[tinylm]") {
    TinyLM model(20, 8, 123);
    for (TokenId prev : {0, 7, 19}) {
        auto p = model.probabilities(prev);
        double sum = 0.0;
        for (double v : p) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("analytic gradients match central finite differences", "[tinylm]") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<TokenId> vocab_dist(3, 20);
        std::uniform_int_distribution<std::size_t> dim_dist(2, 8);
        TokenId vocab = vocab_dist(rng);
        TinyLM model(vocab, dim_dist(rng), rng());
        std::uniform_int_distribution<TokenId> tok(0, vocab - 1);
        std::uniform_int_distribution<int> len(2, 12);
        std::vector<std::vector<TokenId>> sequences(2);
        for (auto& seq : sequences) {
            int n = len(rng);
            for (int i = 0; i < n; ++i) seq.push_back(tok(rng));
        }
        auto result = oracles::gradient_check(model, sequences);
        CHECK(result.max_rel_error < 1e-4);
    }
}

TEST_CASE("tiny lm rejects out-of-vocab tokens", "[tinylm]") {
    TinyLM model(10, 4, 1);
    try {
        model.logits(10);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("tiny lm serialization round-trips", "[tinylm]") {
    TinyLM model(12, 4, 99, 11);
    TinyLM restored = TinyLM::from_json(model.to_json());
    CHECK(restored == model);
}

TEST_CASE("identical seeds give identical models", "[tinylm]") {
    TinyLM a(30, 6, 2024);
    TinyLM b(30, 6, 2024);
    CHECK(a == b);
    TinyLM c(30, 6, 2025);
    CHECK_FALSE(a == c);
}
