#include <catch_amalgamated.hpp>

#include <random>

#include <json.hpp>

#include "finlm/decoding.hpp"

using namespace finlm;
using namespace finlm::gen;

TEST_CASE("repetition penalty divides positive and multiplies non-positive logits", "[decoding]") {
    std::vector<double> logits{2.0, -1.0, 0.5, 0.0};
    auto out = apply_repetition_penalty(logits, {0, 1, 3}, 1.1);
    CHECK(out[0] == Catch::Approx(2.0 / 1.1).epsilon(1e-12));
    CHECK(out[1] == Catch::Approx(-1.1).epsilon(1e-12));
    CHECK(out[2] == 0.5);  // unseen
    CHECK(out[3] == 0.0);  // zero stays zero
}

TEST_CASE("penalty of one is the identity and sign never flips", "[decoding]") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_int_distribution<int> size(1, 40);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> logits(static_cast<std::size_t>(size(rng)));
        for (auto& v : logits) v = val(rng);
        std::unordered_set<TokenId> seen;
        std::uniform_int_distribution<TokenId> pick(0, static_cast<TokenId>(logits.size()) - 1);
        for (std::size_t i = 0; i < logits.size() / 2; ++i) seen.insert(pick(rng));

        CHECK(apply_repetition_penalty(logits, seen, 1.0) == logits);
        auto out = apply_repetition_penalty(logits, seen, 1.7);
        for (std::size_t i = 0; i < logits.size(); ++i) {
            CHECK((logits[i] > 0) == (out[i] > 0));
            CHECK((logits[i] < 0) == (out[i] < 0));
        }
    }
}

TEST_CASE("penalty rejects out-of-range seen tokens", "[decoding]") {
    try {
        apply_repetition_penalty({1.0, 2.0}, {5}, 1.1);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("top-k keeps the k largest with low-index tie break", "[decoding]") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(top_k_filter({1, 3, 2}, 2) == std::vector<double>{-inf, 3, 2});
    CHECK(top_k_filter({1, 3, 2}, 3) == std::vector<double>{1, 3, 2});
    CHECK(top_k_filter({1, 3, 2}, 10) == std::vector<double>{1, 3, 2});
    CHECK(top_k_filter({5, 5, 1}, 1) == std::vector<double>{5, -inf, -inf});
}

TEST_CASE("argmax is invariant under top-k for any k", "[decoding]") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    std::uniform_int_distribution<int> size(1, 50);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> logits(static_cast<std::size_t>(size(rng)));
        for (auto& v : logits) v = val(rng);
        if (trial % 5 == 0 && logits.size() > 2) logits[2] = logits[0];  // force ties sometimes
        std::uniform_int_distribution<std::size_t> kdist(1, logits.size() + 3);
        std::size_t k = kdist(rng);
        CHECK(argmax_lowest_index(top_k_filter(logits, k)) == argmax_lowest_index(logits));
    }
}

TEST_CASE("greedy decode respects max_new_tokens and is deterministic", "[decoding]") {
    train::TinyLM model(30, 6, 321);
    GenerationConfig config;
    config.max_new_tokens = 1;
    auto one = greedy_decode(model, {3, 4}, config);
    CHECK(one.size() == 1);

    config.max_new_tokens = 24;
    auto a = greedy_decode(model, {3, 4}, config);
    auto b = greedy_decode(model, {3, 4}, config);
    CHECK(a == b);
    CHECK(a.size() <= 24);
}

TEST_CASE("greedy decode stops at the end-of-text token", "[decoding]") {
    // Bias the model so eot wins immediately.
    train::TinyLM model(10, 2, 5, 9);
    model.bias()[9] = 50.0;
    GenerationConfig config;
    config.max_new_tokens = 32;
    auto out = greedy_decode(model, {0}, config);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == 9);
}

TEST_CASE("greedy decode rejects empty prompts", "[decoding]") {
    train::TinyLM model(10, 2, 5);
    CHECK_THROWS_AS(greedy_decode(model, {}, GenerationConfig{}), Error);
}

TEST_CASE("reference backend generates deterministic text", "[decoding]") {
    auto tokenizer = std::make_shared<ByteTokenizer>();
    train::TinyLM model(257, 8, 2718, ByteTokenizer::kEot);
    ReferenceBackend backend("reference:test", model, tokenizer);
    GenerationConfig config;
    config.max_new_tokens = 16;
    auto a = backend.generate("The policy rate is", config);
    auto b = backend.generate("The policy rate is", config);
    CHECK(a == b);
    CHECK(backend.identity() == "reference:test");
}

TEST_CASE("reference backend output is always valid utf-8", "[decoding]") {
    auto tokenizer = std::make_shared<ByteTokenizer>();
    GenerationConfig config;
    config.max_new_tokens = 48;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        train::TinyLM model(257, 4, seed, ByteTokenizer::kEot);
        ReferenceBackend backend("reference:test", model, tokenizer);
        std::string out = backend.generate("prompt " + std::to_string(seed), config);
        // nlohmann rejects invalid utf-8 on dump
        CHECK_NOTHROW(nlohmann::json(out).dump());
    }
}

TEST_CASE("utf-8 sanitizer repairs stray bytes and surrogates", "[decoding]") {
    CHECK(util::sanitize_utf8("plain ascii") == "plain ascii");
    std::string japanese = "金融";
    CHECK(util::sanitize_utf8(japanese) == japanese);
    std::string stray = "a\x83z";
    std::string fixed = util::sanitize_utf8(stray);
    CHECK_NOTHROW(nlohmann::json(fixed).dump());
    CHECK(fixed.find('a') == 0);
    CHECK(fixed.find('z') != std::string::npos);
    // encoded surrogate half
    std::string surrogate = "x\xED\xA0\x80y";
    CHECK_NOTHROW(nlohmann::json(util::sanitize_utf8(surrogate)).dump());
    // idempotent
    CHECK(util::sanitize_utf8(fixed) == fixed);
}

TEST_CASE("generation config invariants", "[decoding]") {
    GenerationConfig config;
    CHECK(config.max_new_tokens == 512);
    CHECK_FALSE(config.sampling);
    CHECK(config.top_k == 50);
    CHECK(config.repetition_penalty == 1.1);
    config.top_k = 0;
    CHECK_THROWS_AS(validate(config), Error);
    config = GenerationConfig{};
    config.repetition_penalty = 0.0;
    CHECK_THROWS_AS(validate(config), Error);
    config = GenerationConfig{};
    auto j = to_json(config);
    CHECK(generation_config_from_json(j) == config);
}
