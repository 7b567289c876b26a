#include <catch_amalgamated.hpp>

#include <random>

#include "finlm/render.hpp"
#include "finlm/synthgen.hpp"

using namespace finlm;
using namespace finlm::synth;

TEST_CASE("rephrase prompts embed the passage and layout instructions", "[synthgen]") {
    std::string passage = "The policy rate was held at 0.1 percent.";
    auto qa = make_rephrase_prompt({passage, RephraseKind::qa, 1});
    CHECK(qa.find(passage) != std::string::npos);
    CHECK(qa.find("Q: <question>") != std::string::npos);
    CHECK(qa.find("A: <answer>") != std::string::npos);

    auto mcq = make_rephrase_prompt({passage, RephraseKind::mcq, 2});
    CHECK(mcq.find(passage) != std::string::npos);
    CHECK(mcq.find("2 multiple-choice question(s)") != std::string::npos);
    CHECK(mcq.find("(1) <choice>") != std::string::npos);

    CHECK(make_rephrase_prompt({passage, RephraseKind::qa, 1}) ==
          make_rephrase_prompt({passage, RephraseKind::qa, 1}));
}

TEST_CASE("qa generations parse into pairs", "[synthgen]") {
    auto parsed = parse_generation("Q: a?\nA: b", RephraseKind::qa);
    REQUIRE(parsed.qa_items.size() == 1);
    CHECK(parsed.qa_items[0] == QAPair{"a?", "b"});
    CHECK(parsed.dropped == 0);

    auto multi = parse_generation("Q: one?\nA: 1\nQ: two?\nA: 2\nQ: dangling", RephraseKind::qa);
    CHECK(multi.qa_items.size() == 2);
    CHECK(multi.dropped == 1);
}

TEST_CASE("mcq generations parse label and choices", "[synthgen]") {
    std::string text = "Q: pick\n(1) a\n(2) b\n(3) c\n(4) d\nA: (3)";
    auto parsed = parse_generation(text, RephraseKind::mcq);
    REQUIRE(parsed.mcq_items.size() == 1);
    CHECK(parsed.mcq_items[0].answer_index == 2);
    CHECK(parsed.mcq_items[0].choices == std::vector<std::string>{"a", "b", "c", "d"});

    // answer text, when present, must match the labeled choice
    auto with_text = parse_generation("Q: pick\n(1) a\n(2) b\nA: (2) b", RephraseKind::mcq);
    CHECK(with_text.mcq_items.size() == 1);
    try {
        parse_generation("Q: pick\n(1) a\n(2) b\nA: (2) wrong", RephraseKind::mcq);
        FAIL("expected NoItemsParsed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoItemsParsed);
    }
}

TEST_CASE("garbage text raises NoItemsParsed", "[synthgen]") {
    try {
        parse_generation("nothing to see here", RephraseKind::qa);
        FAIL("expected NoItemsParsed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoItemsParsed);
    }
    CHECK_THROWS_AS(parse_generation("A: orphan answer", RephraseKind::qa), Error);
    CHECK_THROWS_AS(parse_generation("Q: q\n(1) a\nA: (5)", RephraseKind::mcq), Error);
}

TEST_CASE("layout round-trip recovers items exactly", "[synthgen]") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> nitems(1, 4);
    std::uniform_int_distribution<int> nchoices(2, 5);
    std::uniform_int_distribution<int> wordlen(1, 10);
    auto word = [&](const char* prefix, int i) { return std::string(prefix) + std::to_string(i); };

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<QAPair> qa_in;
        std::string qa_text;
        int n = nitems(rng);
        for (int i = 0; i < n; ++i) {
            QAPair item{word("question", i) + "?", word("answer", wordlen(rng))};
            qa_in.push_back(item);
            if (!qa_text.empty()) qa_text += "\n";
            qa_text += corpus::render_qa_text(item);
        }
        auto qa_out = parse_generation(qa_text, RephraseKind::qa);
        CHECK(qa_out.qa_items == qa_in);
        CHECK(qa_out.dropped == 0);

        std::vector<MCQItem> mcq_in;
        std::string mcq_text;
        for (int i = 0; i < n; ++i) {
            MCQItem item;
            item.question = word("q", i);
            int c = nchoices(rng);
            for (int k = 0; k < c; ++k) item.choices.push_back(word("choice", k));
            item.answer_index = static_cast<std::size_t>(wordlen(rng)) % item.choices.size();
            mcq_in.push_back(item);
            if (!mcq_text.empty()) mcq_text += "\n";
            mcq_text += corpus::render_mcq_text(item);
        }
        auto mcq_out = parse_generation(mcq_text, RephraseKind::mcq);
        CHECK(mcq_out.mcq_items == mcq_in);
    }
}

TEST_CASE("validate_item reports violations without throwing", "[synthgen]") {
    CHECK(validate_item(MCQItem{"q", {"a", "b", "c"}, 1}).empty());
    auto dup = validate_item(MCQItem{"q", {"a", "a"}, 0});
    CHECK(std::find(dup.begin(), dup.end(), Violation::DuplicateChoices) != dup.end());
    auto empty = validate_item(QAPair{"q", ""});
    CHECK(std::find(empty.begin(), empty.end(), Violation::EmptyField) != empty.end());
    auto range = validate_item(MCQItem{"q", {"a", "b"}, 7});
    CHECK(std::find(range.begin(), range.end(), Violation::AnswerIndexOutOfRange) != range.end());
    auto copied = validate_item(QAPair{"the passage", "a"}, "the passage");
    CHECK(std::find(copied.begin(), copied.end(), Violation::QuestionCopiesPassage) != copied.end());
}

namespace {

SynthConfig quiet_config() {
    SynthConfig config;
    config.log = util::null_log();
    return config;
}

}  // namespace

TEST_CASE("generate_synthetic emits one result per parsable passage", "[synthgen]") {
    auto mock = gen::MockBackend("mock", [](const std::string&, const gen::GenerationConfig&) {
        return std::string("Q: what?\nA: that");
    });
    std::vector<Passage> passages{{"p1", "text one"}, {"p2", "text two"}, {"p3", "text three"}};
    auto results = generate_synthetic(passages, RephraseKind::qa, mock, quiet_config());
    REQUIRE(results.size() == 3);
    CHECK(results[0].passage_id == "p1");
    CHECK(results[2].passage_id == "p3");
    CHECK(results[0].qa_items.size() == 1);
}

TEST_CASE("unparsable generations are skipped, not fatal", "[synthgen]") {
    auto mock = gen::MockBackend::fixed("mock", "garbage with no layout");
    std::vector<Passage> passages{{"p1", "text"}};
    std::vector<std::string> log_lines;
    SynthConfig config;
    config.log = [&](std::string_view msg) { log_lines.emplace_back(msg); };
    auto results = generate_synthetic(passages, RephraseKind::qa, mock, config);
    CHECK(results.empty());
    REQUIRE(log_lines.size() == 1);
    CHECK(log_lines[0].find("skipped passage 'p1'") != std::string::npos);
}

TEST_CASE("consecutive backend failures exhaust the budget", "[synthgen]") {
    auto mock = gen::MockBackend::failing("mock");
    std::vector<Passage> passages(20, Passage{"p", "text"});
    SynthConfig config = quiet_config();
    config.failure_budget = 5;
    try {
        generate_synthetic(passages, RephraseKind::qa, mock, config);
        FAIL("expected BackendUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BackendUnavailable);
    }
    CHECK(mock.call_count() == 5);
}

TEST_CASE("rerunning with the same inputs yields an identical stream", "[synthgen]") {
    auto responder = [](const std::string& prompt, const gen::GenerationConfig&) {
        return "Q: about '" + prompt.substr(prompt.size() / 2, 8) + "'?\nA: yes";
    };
    std::vector<Passage> passages{{"p1", "alpha beta"}, {"p2", "gamma delta"}};
    auto mock_a = gen::MockBackend("mock", responder);
    auto run_a = generate_synthetic(passages, RephraseKind::qa, mock_a, quiet_config());
    auto mock_b = gen::MockBackend("mock", responder);
    auto run_b = generate_synthetic(passages, RephraseKind::qa, mock_b, quiet_config());
    CHECK(run_a == run_b);
}

TEST_CASE("emitted items all satisfy validate_item", "[synthgen]") {
    // Mixed good and broken generations.
    int call = 0;
    auto mock = gen::MockBackend("mock", [&call](const std::string&, const gen::GenerationConfig&) {
        return (call++ % 2 == 0) ? std::string("Q: ok?\nA: yes\nQ: broken")
                                 : std::string("Q: pick\n(1) a\n(2) b\nA: (1)");
    });
    std::vector<Passage> passages{{"p1", "t"}, {"p2", "t"}, {"p3", "t"}, {"p4", "t"}};
    SynthConfig config = quiet_config();
    auto qa_results = generate_synthetic(passages, RephraseKind::qa, mock, config);
    for (const auto& r : qa_results) {
        for (const auto& item : r.qa_items) CHECK(validate_item(item).empty());
        for (const auto& item : r.mcq_items) CHECK(validate_item(item).empty());
    }
}

TEST_CASE("results serialize through jsonl", "[synthgen]") {
    RephraseResult r;
    r.passage_id = "p1";
    r.kind = RephraseKind::mcq;
    r.mcq_items = {MCQItem{"q", {"a", "b"}, 1}};
    r.raw_generation = "Q: q\n(1) a\n(2) b\nA: (2)";
    auto restored = rephrase_result_from_json(to_json(r));
    CHECK(restored == r);
}

TEST_CASE("parallel workers preserve input order", "[synthgen]") {
    auto mock = gen::MockBackend("mock", [](const std::string& prompt, const gen::GenerationConfig&) {
        // answer varies with the passage embedded in the prompt
        auto pos = prompt.find("passage-");
        return "Q: which?\nA: " + prompt.substr(pos, 10);
    });
    std::vector<Passage> passages;
    for (int i = 0; i < 16; ++i)
        passages.push_back({"p" + std::to_string(i), "passage-" + std::to_string(i) + " body"});
    SynthConfig config = quiet_config();
    config.workers = 4;
    auto parallel = generate_synthetic(passages, RephraseKind::qa, mock, config);
    config.workers = 1;
    auto serial = generate_synthetic(passages, RephraseKind::qa, mock, config);
    CHECK(parallel == serial);
}
