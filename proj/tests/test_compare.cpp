#include <catch_amalgamated.hpp>

#include "finlm/compare.hpp"

using namespace finlm;
using namespace finlm::cmp;

namespace {

std::vector<std::string> fixture_prompts() {
    return {"The policy board decided", "Corporate bond spreads are", "A currency swap is",
            "Deposit insurance covers", "Negative interest rates imply"};
}

}  // namespace

TEST_CASE("each prompt goes to both backends under one config", "[compare]") {
    auto a = gen::MockBackend("model-a", [](const std::string& p, const gen::GenerationConfig&) {
        return p + " ... continuation from A.";
    });
    auto b = gen::MockBackend("model-b", [](const std::string& p, const gen::GenerationConfig&) {
        return p + " ... B's much longer continuation with extra detail.";
    });
    ByteTokenizer tok;
    auto cases = compare_outputs(fixture_prompts(), a, b, gen::GenerationConfig{}, tok);
    REQUIRE(cases.size() == 5);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        CHECK(cases[i].prompt == fixture_prompts()[i]);
        CHECK(cases[i].a_ok);
        CHECK(cases[i].b_ok);
        CHECK(cases[i].output_a != cases[i].output_b);
        CHECK(cases[i].chars_a == util::utf8_length(cases[i].output_a));
        CHECK(cases[i].tokens_a == tok.encode(cases[i].output_a).size());
    }
}

TEST_CASE("identical backends produce identical paired outputs", "[compare]") {
    auto responder = [](const std::string& p, const gen::GenerationConfig&) { return p + "!"; };
    auto a = gen::MockBackend("same", responder);
    auto b = gen::MockBackend("same", responder);
    ByteTokenizer tok;
    auto cases = compare_outputs(fixture_prompts(), a, b, gen::GenerationConfig{}, tok);
    for (const auto& c : cases) CHECK(c.output_a == c.output_b);
}

TEST_CASE("a failing backend marks its side and the run continues", "[compare]") {
    auto a = gen::MockBackend::echo("model-a");
    auto b = gen::MockBackend::failing("model-b");
    ByteTokenizer tok;
    auto cases = compare_outputs(fixture_prompts(), a, b, gen::GenerationConfig{}, tok);
    REQUIRE(cases.size() == 5);
    for (const auto& c : cases) {
        CHECK(c.a_ok);
        CHECK_FALSE(c.b_ok);
        CHECK(c.output_b.empty());
    }
}

TEST_CASE("report rendering is byte-stable", "[compare]") {
    auto a = gen::MockBackend::echo("model-a");
    auto b = gen::MockBackend::fixed("model-b", "fixed answer");
    ByteTokenizer tok;
    auto cases = compare_outputs(fixture_prompts(), a, b, gen::GenerationConfig{}, tok);
    std::string r1 = render_comparison(cases);
    std::string r2 = render_comparison(cases);
    CHECK(r1 == r2);
    CHECK(r1.find("## Case 1: The policy board decided") != std::string::npos);
    CHECK(r1.find("**model-a:**") != std::string::npos);
    CHECK(r1.find("**model-b:**") != std::string::npos);
    CHECK(r1.find("---") != std::string::npos);
    CHECK(r1.find("Output length summary") != std::string::npos);
}

TEST_CASE("length summary arithmetic", "[compare]") {
    auto a = gen::MockBackend("model-a", [](const std::string& p, const gen::GenerationConfig&) {
        return std::string(p == "p1" ? 100 : 300, 'x');
    });
    auto b = gen::MockBackend::fixed("model-b", "yy");
    ByteTokenizer tok;
    auto cases = compare_outputs({"p1", "p2"}, a, b, gen::GenerationConfig{}, tok);
    auto stats = length_stats({cases[0].chars_a, cases[1].chars_a});
    CHECK(stats.mean == 200.0);
    CHECK(stats.median == 200.0);
    CHECK(stats.min == 100);
    CHECK(stats.max == 300);
    CHECK(stats.total == 400);
}

TEST_CASE("length stats are ordered min <= median <= max and min <= mean <= max", "[compare]") {
    auto stats = length_stats({5, 1, 9, 9});
    CHECK(stats.min <= stats.median);
    CHECK(stats.median <= static_cast<double>(stats.max));
    CHECK(static_cast<double>(stats.min) <= stats.mean);
    CHECK(stats.mean <= static_cast<double>(stats.max));
}

TEST_CASE("empty case lists cannot be rendered", "[compare]") {
    try {
        render_comparison({});
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
}
