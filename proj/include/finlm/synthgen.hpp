#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "finlm/corpus.hpp"
#include "finlm/errors.hpp"
#include "finlm/generation.hpp"
#include "finlm/render.hpp"
#include "finlm/util.hpp"

namespace finlm::synth {

using corpus::MCQItem;
using corpus::QAPair;

enum class RephraseKind { qa, mcq };

inline std::string to_string(RephraseKind k) { return k == RephraseKind::qa ? "qa" : "mcq"; }

inline RephraseKind rephrase_kind_from(const std::string& s) {
    if (s == "qa") return RephraseKind::qa;
    if (s == "mcq") return RephraseKind::mcq;
    throw Error(ErrorCode::UsageError, "unknown rephrase kind: " + s);
}

struct RephraseRequest {
    std::string passage;
    RephraseKind kind = RephraseKind::qa;
    int max_items = 1;
};

// Prompt templates are configuration: swappable text files with {passage}
// and {max_items} placeholders. The defaults instruct the exact layout
// parse_generation understands.
struct PromptTemplates {
    std::string qa_template =
        "Rephrase the following passage as {max_items} question-and-answer pair(s) about its "
        "content.\nWrite each pair as two lines, exactly in this layout:\nQ: <question>\nA: "
        "<answer>\n\nPassage:\n{passage}\n";
    std::string mcq_template =
        "Rephrase the following passage as {max_items} multiple-choice question(s) about its "
        "content.\nWrite each question exactly in this layout:\nQ: <question>\n(1) <choice>\n(2) "
        "<choice>\n(3) <choice>\n(4) <choice>\nA: (<number of the correct choice>) <text of the "
        "correct choice>\n\nPassage:\n{passage}\n";

    static PromptTemplates from_files(const std::optional<std::string>& qa_path,
                                      const std::optional<std::string>& mcq_path) {
        auto slurp = [](const std::string& path) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
            return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        };
        PromptTemplates t;
        if (qa_path) t.qa_template = slurp(*qa_path);
        if (mcq_path) t.mcq_template = slurp(*mcq_path);
        return t;
    }
};

inline std::string make_rephrase_prompt(const RephraseRequest& request,
                                        const PromptTemplates& templates = {}) {
    if (request.passage.empty()) throw Error(ErrorCode::EmptyInput, "passage is empty");
    if (request.max_items < 1) throw Error(ErrorCode::DomainError, "max_items must be >= 1");
    const std::string& tpl =
        request.kind == RephraseKind::qa ? templates.qa_template : templates.mcq_template;
    std::string prompt = util::replace_all(tpl, "{passage}", request.passage);
    return util::replace_all(std::move(prompt), "{max_items}", std::to_string(request.max_items));
}

// ---------------------------------------------------------------------------
// Parsing generated text back into items

struct ParsedGeneration {
    std::vector<QAPair> qa_items;
    std::vector<MCQItem> mcq_items;
    std::size_t dropped = 0;  // malformed item candidates
};

namespace detail {

// Returns the 1-based label of a "(N) ..." choice line, or nullopt.
inline std::optional<std::size_t> parse_choice_label(std::string_view line, std::string_view* rest) {
    if (line.size() < 3 || line[0] != '(') return std::nullopt;
    std::size_t close = line.find(')');
    if (close == std::string_view::npos || close < 2 || close > 7) return std::nullopt;
    std::size_t value = 0;
    for (std::size_t i = 1; i < close; ++i) {
        if (line[i] < '0' || line[i] > '9') return std::nullopt;
        value = value * 10 + static_cast<std::size_t>(line[i] - '0');
    }
    if (value == 0) return std::nullopt;
    if (rest) *rest = util::trim(line.substr(close + 1));
    return value;
}

inline ParsedGeneration parse_qa(const std::vector<std::string>& lines) {
    ParsedGeneration out;
    std::optional<std::string> question;
    std::optional<std::string> answer;
    auto finish = [&] {
        if (!question && !answer) return;
        if (question && answer && !question->empty() && !answer->empty()) {
            out.qa_items.push_back({*question, *answer});
        } else {
            ++out.dropped;
        }
        question.reset();
        answer.reset();
    };
    for (const auto& raw : lines) {
        std::string_view line = util::trim(raw);
        if (util::starts_with(line, "Q:")) {
            finish();
            question = std::string(util::trim(line.substr(2)));
        } else if (util::starts_with(line, "A:")) {
            if (answer) finish();
            if (!question) {
                ++out.dropped;
                continue;
            }
            answer = std::string(util::trim(line.substr(2)));
        } else if (!line.empty()) {
            // continuation of the open field
            if (answer) {
                *answer += answer->empty() ? std::string(line) : "\n" + std::string(line);
            } else if (question) {
                *question += question->empty() ? std::string(line) : "\n" + std::string(line);
            }
        }
    }
    finish();
    return out;
}

inline ParsedGeneration parse_mcq(const std::vector<std::string>& lines) {
    ParsedGeneration out;
    std::optional<std::string> question;
    std::vector<std::string> choices;
    bool malformed = false;
    auto reset = [&] {
        question.reset();
        choices.clear();
        malformed = false;
    };
    auto abandon = [&] {
        if (question || !choices.empty()) ++out.dropped;
        reset();
    };
    for (const auto& raw : lines) {
        std::string_view line = util::trim(raw);
        if (line.empty()) continue;
        if (util::starts_with(line, "Q:")) {
            abandon();
            question = std::string(util::trim(line.substr(2)));
            continue;
        }
        if (!question) continue;
        if (util::starts_with(line, "A:")) {
            std::string_view answer_part = util::trim(line.substr(2));
            std::string_view answer_text;
            auto label = parse_choice_label(answer_part, &answer_text);
            bool ok = !malformed && label && *label <= choices.size() && choices.size() >= 2 &&
                      !question->empty();
            if (ok && !answer_text.empty() && answer_text != choices[*label - 1]) ok = false;
            if (ok) {
                MCQItem item;
                item.question = *question;
                item.choices = choices;
                item.answer_index = *label - 1;
                out.mcq_items.push_back(std::move(item));
                reset();
            } else {
                abandon();
            }
            continue;
        }
        std::string_view rest;
        if (auto label = parse_choice_label(line, &rest)) {
            if (*label != choices.size() + 1 || rest.empty()) {
                malformed = true;
            } else {
                choices.emplace_back(rest);
            }
            continue;
        }
        if (choices.empty()) {
            *question += question->empty() ? std::string(line) : "\n" + std::string(line);
        }
    }
    abandon();
    return out;
}

}  // namespace detail

inline ParsedGeneration parse_generation(const std::string& raw, RephraseKind kind) {
    auto lines = util::split_lines(raw);
    ParsedGeneration out =
        kind == RephraseKind::qa ? detail::parse_qa(lines) : detail::parse_mcq(lines);
    if (out.qa_items.empty() && out.mcq_items.empty())
        throw Error(ErrorCode::NoItemsParsed, "no well-formed items in generation");
    return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class Violation {
    EmptyField,
    TooFewChoices,
    DuplicateChoices,
    AnswerIndexOutOfRange,
    QuestionCopiesPassage,
};

inline std::string to_string(Violation v) {
    switch (v) {
        case Violation::EmptyField: return "EmptyField";
        case Violation::TooFewChoices: return "TooFewChoices";
        case Violation::DuplicateChoices: return "DuplicateChoices";
        case Violation::AnswerIndexOutOfRange: return "AnswerIndexOutOfRange";
        case Violation::QuestionCopiesPassage: return "QuestionCopiesPassage";
    }
    return "EmptyField";
}

inline std::vector<Violation> validate_item(const QAPair& item, std::string_view passage = {}) {
    std::vector<Violation> violations;
    if (item.question.empty() || item.answer.empty()) violations.push_back(Violation::EmptyField);
    if (!passage.empty() && util::trim(item.question) == util::trim(passage))
        violations.push_back(Violation::QuestionCopiesPassage);
    return violations;
}

inline std::vector<Violation> validate_item(const MCQItem& item, std::string_view passage = {}) {
    std::vector<Violation> violations;
    if (item.question.empty()) violations.push_back(Violation::EmptyField);
    for (const auto& c : item.choices) {
        if (c.empty()) {
            violations.push_back(Violation::EmptyField);
            break;
        }
    }
    if (item.choices.size() < 2) violations.push_back(Violation::TooFewChoices);
    for (std::size_t i = 0; i < item.choices.size() && i + 1 < item.choices.size(); ++i) {
        bool dup = false;
        for (std::size_t k = i + 1; k < item.choices.size(); ++k)
            if (item.choices[i] == item.choices[k]) dup = true;
        if (dup) {
            violations.push_back(Violation::DuplicateChoices);
            break;
        }
    }
    if (item.answer_index >= item.choices.size()) violations.push_back(Violation::AnswerIndexOutOfRange);
    if (!passage.empty() && util::trim(item.question) == util::trim(passage))
        violations.push_back(Violation::QuestionCopiesPassage);
    return violations;
}

// ---------------------------------------------------------------------------
// Pipeline

struct RephraseResult {
    std::string passage_id;
    RephraseKind kind = RephraseKind::qa;
    std::vector<QAPair> qa_items;
    std::vector<MCQItem> mcq_items;
    std::string raw_generation;

    bool operator==(const RephraseResult&) const = default;
};

inline nlohmann::json to_json(const RephraseResult& r) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& i : r.qa_items) items.push_back(corpus::to_json(i));
    for (const auto& i : r.mcq_items) items.push_back(corpus::to_json(i));
    return nlohmann::json{{"passage_id", r.passage_id},
                          {"kind", to_string(r.kind)},
                          {"items", items},
                          {"raw_generation", r.raw_generation}};
}

inline RephraseResult rephrase_result_from_json(const nlohmann::json& j) {
    RephraseResult r;
    r.passage_id = j.at("passage_id").get<std::string>();
    r.kind = rephrase_kind_from(j.at("kind").get<std::string>());
    for (const auto& item : j.at("items")) {
        if (r.kind == RephraseKind::qa)
            r.qa_items.push_back(corpus::qa_pair_from_json(item));
        else
            r.mcq_items.push_back(corpus::mcq_item_from_json(item));
    }
    r.raw_generation = j.value("raw_generation", std::string{});
    return r;
}

struct Passage {
    std::string id;
    std::string text;
};

struct SynthConfig {
    int max_items = 1;
    int max_items_ceiling = 16;
    int failure_budget = 5;  // consecutive backend failures before giving up
    std::size_t workers = 1;
    PromptTemplates templates;
    gen::GenerationConfig generation;
    util::LogFn log = util::stderr_log();
};

// Runs prompt -> generate -> parse -> validate for every passage. Passages
// whose generation cannot be parsed or validates to nothing are logged and
// skipped; the stream only aborts when the backend fails `failure_budget`
// times in a row. Results keep passage order.
inline std::vector<RephraseResult> generate_synthetic(const std::vector<Passage>& passages,
                                                      RephraseKind kind, gen::GenerationBackend& backend,
                                                      const SynthConfig& config = {}) {
    if (config.max_items < 1 || config.max_items > config.max_items_ceiling)
        throw Error(ErrorCode::DomainError, "max_items outside [1, ceiling]");

    struct Outcome {
        std::optional<RephraseResult> result;
        bool backend_failure = false;
        std::string note;
    };

    auto process = [&](std::size_t i) -> Outcome {
        const Passage& passage = passages[i];
        Outcome outcome;
        if (passage.text.empty()) {
            outcome.note = "empty passage";
            return outcome;
        }
        RephraseRequest request{passage.text, kind, config.max_items};
        std::string prompt = make_rephrase_prompt(request, config.templates);
        std::string raw;
        try {
            raw = backend.generate(prompt, config.generation);
        } catch (const Error& e) {
            outcome.backend_failure = (e.category() == ErrorCategory::backend);
            outcome.note = e.what();
            return outcome;
        } catch (const std::exception& e) {
            outcome.backend_failure = true;
            outcome.note = e.what();
            return outcome;
        }
        ParsedGeneration parsed;
        try {
            parsed = parse_generation(raw, kind);
        } catch (const Error& e) {
            outcome.note = e.what();
            return outcome;
        }
        RephraseResult result;
        result.passage_id = passage.id;
        result.kind = kind;
        result.raw_generation = raw;
        auto take = static_cast<std::size_t>(config.max_items);
        for (const auto& item : parsed.qa_items) {
            if (result.qa_items.size() >= take) break;
            if (validate_item(item, passage.text).empty()) result.qa_items.push_back(item);
        }
        for (const auto& item : parsed.mcq_items) {
            if (result.mcq_items.size() >= take) break;
            if (validate_item(item, passage.text).empty()) result.mcq_items.push_back(item);
        }
        if (result.qa_items.empty() && result.mcq_items.empty()) {
            outcome.note = "all parsed items failed validation";
            return outcome;
        }
        outcome.result = std::move(result);
        return outcome;
    };

    std::vector<Outcome> outcomes;
    if (config.workers <= 1) {
        int consecutive = 0;
        for (std::size_t i = 0; i < passages.size(); ++i) {
            Outcome o = process(i);
            if (o.backend_failure) {
                if (++consecutive >= config.failure_budget)
                    throw Error(ErrorCode::BackendUnavailable,
                                std::to_string(consecutive) + " consecutive backend failures; last: " + o.note);
            } else {
                consecutive = 0;
            }
            outcomes.push_back(std::move(o));
        }
    } else {
        outcomes = util::parallel_ordered_map<Outcome>(passages.size(), config.workers, process);
        int consecutive = 0;
        for (const auto& o : outcomes) {
            consecutive = o.backend_failure ? consecutive + 1 : 0;
            if (consecutive >= config.failure_budget)
                throw Error(ErrorCode::BackendUnavailable,
                            std::to_string(consecutive) + " consecutive backend failures; last: " + o.note);
        }
    }

    std::vector<RephraseResult> results;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].result) {
            results.push_back(std::move(*outcomes[i].result));
        } else {
            config.log("synthgen: skipped passage '" + passages[i].id + "': " + outcomes[i].note);
        }
    }
    return results;
}

}  // namespace finlm::synth
