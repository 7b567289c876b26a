#include <catch_amalgamated.hpp>

#include <random>

#include "finlm/loss_curve.hpp"
#include "finlm/trainer.hpp"
#include "finlm/train_plan.hpp"

using namespace finlm;
using namespace finlm::train;

namespace {

std::vector<PackedSequence> small_packed_fixture(std::size_t nseq, std::size_t len) {
    std::mt19937 rng(41);
    std::uniform_int_distribution<TokenId> byte(32, 126);
    std::vector<std::vector<TokenId>> docs;
    for (std::size_t i = 0; i < nseq; ++i) {
        std::vector<TokenId> doc(len);
        for (auto& t : doc) t = byte(rng);
        docs.push_back(std::move(doc));
    }
    return pack_sequences(docs, len);
}

TrainPlan small_plan(int epochs = 2, int batch = 2) {
    TrainPlan plan;
    plan.epochs = epochs;
    plan.global_batch = batch;
    plan.per_device_batch = batch;
    plan.device_count = 1;
    plan.lr_init = 1e-3;
    plan.max_seq_len = 64;
    return plan;
}

}  // namespace

TEST_CASE("training records the full schedule down to lr zero", "[trainer]") {
    auto packed = small_packed_fixture(4, 64);
    auto result = train_reference(packed, small_plan(), 7, {.model_dim = 4});
    // 2 epochs x 2 batches = 4 steps, plus the final evaluation entry
    CHECK(result.total_steps == 4);
    REQUIRE(result.curve.entries.size() == 5);
    CHECK(result.curve.entries.front().lr == 1e-3);
    CHECK(result.curve.entries.back().lr == 0.0);
    CHECK(result.curve.entries.back().step == 4);
    for (std::size_t i = 1; i < result.curve.entries.size(); ++i) {
        CHECK(result.curve.entries[i].step > result.curve.entries[i - 1].step);
        CHECK(result.curve.entries[i].lr <= result.curve.entries[i - 1].lr);
    }
}

TEST_CASE("zero learning rate leaves parameters unchanged and the curve flat", "[trainer]") {
    auto packed = small_packed_fixture(4, 64);
    TrainPlan plan = small_plan();
    plan.lr_init = 0.0;
    auto result = train_reference(packed, plan, 7, {.model_dim = 4});
    TinyLM init(257, 4, 7, ByteTokenizer::kEot);
    CHECK(result.model == init);
    // per-batch losses repeat identically across epochs
    CHECK(result.curve.entries[0].loss == result.curve.entries[2].loss);
    CHECK(result.curve.entries[1].loss == result.curve.entries[3].loss);
}

TEST_CASE("training is deterministic for a fixed seed", "[trainer]") {
    auto packed = small_packed_fixture(6, 48);
    auto a = train_reference(packed, small_plan(), 99, {.model_dim = 4});
    auto b = train_reference(packed, small_plan(), 99, {.model_dim = 4});
    CHECK(a.curve == b.curve);
    CHECK(a.model == b.model);
    CHECK(loss_curve_csv(a.curve) == loss_curve_csv(b.curve));
    auto c = train_reference(packed, small_plan(), 100, {.model_dim = 4});
    CHECK_FALSE(a.curve == c.curve);
}

TEST_CASE("divergent runs abort with NonFiniteLoss", "[trainer]") {
    auto packed = small_packed_fixture(4, 64);
    TrainPlan plan = small_plan(4);
    plan.lr_init = 1e30;
    try {
        train_reference(packed, plan, 7, {.model_dim = 4});
        FAIL("expected NonFiniteLoss");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteLoss);
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("empty packed input is rejected", "[trainer]") {
    CHECK_THROWS_AS(train_reference({}, small_plan(), 1), Error);
}

TEST_CASE("loss curve csv round-trips", "[trainer]") {
    LossCurve curve;
    curve.entries = {{0, 5e-7, 5.5413}, {1, 2.5e-7, 5.5401}, {2, 0.0, 5.5399}};
    auto parsed = parse_loss_curve_csv(loss_curve_csv(curve));
    CHECK(parsed == curve);
    CHECK(loss_curve_csv(parsed) == loss_curve_csv(curve));
}

TEST_CASE("spike detection follows the trailing-median rule", "[trainer]") {
    // median(2.0, 1.9, 1.8) = 1.9; 2.6 > 1.25 * 1.9 flags index 3 only
    LossCurve curve;
    double losses[] = {2.0, 1.9, 1.8, 2.6, 1.7};
    for (std::size_t i = 0; i < 5; ++i) curve.entries.push_back({i, 0.0, losses[i]});
    AnalyzeConfig config;
    config.spike_window = 3;
    config.spike_ratio = 1.25;
    auto analysis = analyze_curve(curve, config);
    CHECK(analysis.spikes == std::vector<std::uint64_t>{3});
}

TEST_CASE("strictly decreasing curves have no spikes", "[trainer]") {
    LossCurve curve;
    double loss = 8.0;
    for (std::uint64_t s = 0; s < 120; ++s) {
        curve.entries.push_back({s, 0.0, loss});
        loss *= 0.97;
    }
    auto analysis = analyze_curve(curve);
    CHECK(analysis.spikes.empty());
}

TEST_CASE("constant tails saturate with zero slope", "[trainer]") {
    LossCurve curve;
    for (std::uint64_t s = 0; s < 60; ++s)
        curve.entries.push_back({s, 0.0, s < 30 ? 5.0 - 0.05 * static_cast<double>(s) : 3.5});
    auto analysis = analyze_curve(curve);
    CHECK(analysis.saturated);
    CHECK(analysis.tail_slope == 0.0);
}

TEST_CASE("steep tails are not saturated", "[trainer]") {
    LossCurve curve;
    for (std::uint64_t s = 0; s < 60; ++s)
        curve.entries.push_back({s, 0.0, 10.0 - 0.1 * static_cast<double>(s)});
    auto analysis = analyze_curve(curve);
    CHECK_FALSE(analysis.saturated);
    CHECK(analysis.tail_slope == Catch::Approx(-0.1).epsilon(1e-9));
}

TEST_CASE("curves shorter than the window are rejected", "[trainer]") {
    LossCurve curve;
    for (std::uint64_t s = 0; s < 10; ++s) curve.entries.push_back({s, 0.0, 1.0});
    try {
        analyze_curve(curve);  // default window 25
        FAIL("expected CurveTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CurveTooShort);
    }
}

TEST_CASE("plan manifest contains the full-scale defaults", "[trainer]") {
    TrainPlan plan;
    std::string manifest = emit_training_plan(plan);
    CHECK(manifest.find("devices=A100 80GB x4\n") != std::string::npos);
    CHECK(manifest.find("lr_init=5e-07\n") != std::string::npos);
    CHECK(manifest.find("schedule=linear_to_zero\n") != std::string::npos);
    CHECK(manifest.find("epochs=5\n") != std::string::npos);
    CHECK(manifest.find("global_batch=24\n") != std::string::npos);
    CHECK(manifest.find("per_device_batch=6\n") != std::string::npos);
    CHECK(manifest.find("max_seq_len=2048\n") != std::string::npos);
    CHECK(manifest.find("dtype=bf16\n") != std::string::npos);
    CHECK(manifest.find("grad_accum=1\n") != std::string::npos);
    CHECK(manifest.find("grad_checkpointing=true\n") != std::string::npos);
}

TEST_CASE("plan manifest round-trips", "[trainer]") {
    TrainPlan plan;
    plan.epochs = 3;
    plan.lr_init = 1.25e-6;
    plan.devices = "H100 x2";
    plan.device_count = 2;
    plan.per_device_batch = 4;
    plan.global_batch = 8;
    std::string manifest = emit_training_plan(plan);
    TrainPlan parsed = parse_training_plan(manifest);
    CHECK(parsed == plan);
    CHECK(emit_training_plan(parsed) == manifest);
}

TEST_CASE("inconsistent batch geometry is an invalid plan", "[trainer]") {
    TrainPlan plan;
    plan.per_device_batch = 6;
    plan.device_count = 3;
    plan.global_batch = 24;  // 24 != 18
    try {
        emit_training_plan(plan);
        FAIL("expected InvalidPlan");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidPlan);
    }
}
