#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finlm/corpus.hpp"
#include "finlm/errors.hpp"
#include "finlm/generation.hpp"
#include "finlm/scoring.hpp"
#include "finlm/util.hpp"

namespace finlm::eval {

enum class Polarity { positive, negative, neutral };

inline std::string to_string(Polarity p) {
    switch (p) {
        case Polarity::positive: return "positive";
        case Polarity::negative: return "negative";
        case Polarity::neutral: return "neutral";
    }
    return "neutral";
}

inline Polarity polarity_from(const std::string& s) {
    if (s == "positive") return Polarity::positive;
    if (s == "negative") return Polarity::negative;
    if (s == "neutral") return Polarity::neutral;
    throw Error(ErrorCode::ParseError, "unknown polarity: " + s);
}

struct MCQEvalItem {
    std::string id;
    std::string question;
    std::vector<std::string> choices;
    std::size_t gold_index = 0;
};

struct SentimentEvalItem {
    std::string id;
    std::string sentence;
    std::string target;
    Polarity gold_polarity = Polarity::neutral;
};

struct EvalTask {
    std::string name;
    Metric metric = Metric::accuracy;
    std::vector<MCQEvalItem> mcq_items;            // metric == accuracy
    std::vector<SentimentEvalItem> sentiment_items;  // metric == f1

    std::size_t size() const {
        return metric == Metric::f1 ? sentiment_items.size() : mcq_items.size();
    }
};

// The benchmark's five tasks; additional task names default to accuracy
// unless declared otherwise in the dataset file.
inline const std::map<std::string, Metric>& default_task_registry() {
    static const std::map<std::string, Metric> registry{
        {"chabsa", Metric::f1},          {"cma_basics", Metric::accuracy},
        {"cpa_audit", Metric::accuracy}, {"fp2", Metric::accuracy},
        {"security_sales_1", Metric::accuracy},
    };
    return registry;
}

inline Metric metric_for_task(const std::string& name) {
    auto it = default_task_registry().find(name);
    return it == default_task_registry().end() ? Metric::accuracy : it->second;
}

// ---------------------------------------------------------------------------
// Dataset loading (JSONL, one item per line)

inline MCQEvalItem mcq_eval_item_from_json(const nlohmann::json& j) {
    MCQEvalItem item;
    item.id = j.value("id", std::string{});
    item.question = j.at("question").get<std::string>();
    item.choices = j.at("choices").get<std::vector<std::string>>();
    item.gold_index = j.at("gold_index").get<std::size_t>();
    if (item.choices.size() < 2) throw Error(ErrorCode::InvalidItem, "item needs at least 2 choices");
    if (item.gold_index >= item.choices.size())
        throw Error(ErrorCode::InvalidItem, "gold_index out of range");
    for (std::size_t i = 0; i < item.choices.size(); ++i)
        for (std::size_t k = i + 1; k < item.choices.size(); ++k)
            if (item.choices[i] == item.choices[k])
                throw Error(ErrorCode::InvalidItem, "duplicate choices");
    return item;
}

inline SentimentEvalItem sentiment_eval_item_from_json(const nlohmann::json& j) {
    SentimentEvalItem item;
    item.id = j.value("id", std::string{});
    item.sentence = j.at("sentence").get<std::string>();
    item.target = j.at("target").get<std::string>();
    item.gold_polarity = polarity_from(j.at("gold_polarity").get<std::string>());
    if (item.sentence.find(item.target) == std::string::npos)
        throw Error(ErrorCode::InvalidItem, "target does not occur in sentence");
    return item;
}

inline EvalTask load_task(const std::string& name, const std::filesystem::path& path) {
    EvalTask task;
    task.name = name;
    task.metric = metric_for_task(name);
    if (task.metric == Metric::f1) {
        task.sentiment_items = corpus::read_jsonl_file<SentimentEvalItem>(path, sentiment_eval_item_from_json);
    } else {
        task.mcq_items = corpus::read_jsonl_file<MCQEvalItem>(path, mcq_eval_item_from_json);
    }
    if (task.size() == 0) throw Error(ErrorCode::EmptyInput, "task dataset is empty: " + name);
    for (std::size_t i = 0; i < task.mcq_items.size(); ++i)
        if (task.mcq_items[i].id.empty()) task.mcq_items[i].id = name + "-" + std::to_string(i);
    for (std::size_t i = 0; i < task.sentiment_items.size(); ++i)
        if (task.sentiment_items[i].id.empty()) task.sentiment_items[i].id = name + "-" + std::to_string(i);
    return task;
}

// ---------------------------------------------------------------------------
// Prompt construction (zero-shot by default)

struct FewshotPool {
    std::vector<MCQEvalItem> mcq;
    std::vector<SentimentEvalItem> sentiment;
};

namespace detail {

inline const std::map<std::string, std::string>& task_instructions() {
    static const std::map<std::string, std::string> instructions{
        {"chabsa",
         "Determine the sentiment polarity (positive, negative, or neutral) toward the target in the "
         "sentence."},
        {"cma_basics", "Answer the following securities-analysis question."},
        {"cpa_audit", "Answer the following audit question."},
        {"fp2", "Answer the following financial-planning question."},
        {"security_sales_1", "Answer the following securities-sales question."},
    };
    return instructions;
}

inline std::string instruction_for(const std::string& task_name, Metric metric) {
    auto it = task_instructions().find(task_name);
    if (it != task_instructions().end()) return it->second;
    return metric == Metric::f1
               ? "Determine the sentiment polarity (positive, negative, or neutral) toward the target in "
                 "the sentence."
               : "Answer the following question.";
}

inline std::string render_mcq_prompt_body(const MCQEvalItem& item,
                                          std::optional<std::size_t> answer = std::nullopt) {
    std::string out = "Question: " + item.question + "\nChoices:\n";
    for (std::size_t i = 0; i < item.choices.size(); ++i)
        out += "(" + std::to_string(i + 1) + ") " + item.choices[i] + "\n";
    out += "Answer:";
    if (answer) out += " (" + std::to_string(*answer + 1) + ")";
    return out;
}

inline std::string render_sentiment_prompt_body(const SentimentEvalItem& item,
                                                std::optional<Polarity> answer = std::nullopt) {
    std::string out = "Sentence: " + item.sentence + "\nTarget: " + item.target + "\nPolarity:";
    if (answer) out += " " + to_string(*answer);
    return out;
}

}  // namespace detail

inline std::string build_prompt(const EvalTask& task, const MCQEvalItem& item, int fewshots = 0,
                                const FewshotPool& pool = {}) {
    if (fewshots > static_cast<int>(pool.mcq.size()))
        throw Error(ErrorCode::MissingExemplars, "fewshots=" + std::to_string(fewshots) + " but pool has " +
                                                     std::to_string(pool.mcq.size()));
    std::string prompt = detail::instruction_for(task.name, Metric::accuracy) +
                         " Reply with the number of the correct choice.\n\n";
    for (int i = 0; i < fewshots; ++i)
        prompt += detail::render_mcq_prompt_body(pool.mcq[static_cast<std::size_t>(i)],
                                                 pool.mcq[static_cast<std::size_t>(i)].gold_index) +
                  "\n\n";
    prompt += detail::render_mcq_prompt_body(item);
    return prompt;
}

inline std::string build_prompt(const EvalTask& task, const SentimentEvalItem& item, int fewshots = 0,
                                const FewshotPool& pool = {}) {
    if (fewshots > static_cast<int>(pool.sentiment.size()))
        throw Error(ErrorCode::MissingExemplars, "fewshots=" + std::to_string(fewshots) + " but pool has " +
                                                     std::to_string(pool.sentiment.size()));
    std::string prompt = detail::instruction_for(task.name, Metric::f1) + "\n\n";
    for (int i = 0; i < fewshots; ++i)
        prompt += detail::render_sentiment_prompt_body(pool.sentiment[static_cast<std::size_t>(i)],
                                                       pool.sentiment[static_cast<std::size_t>(i)].gold_polarity) +
                  "\n\n";
    prompt += detail::render_sentiment_prompt_body(item);
    return prompt;
}

// ---------------------------------------------------------------------------
// Answer extraction

namespace detail {

inline bool is_alnum_ascii(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace detail

// Rule cascade, first hit wins:
//   1. first standalone choice label: a digit run whose value is 1..N, or a
//      letter a..(a+N-1) adorned as "(b", "b)", "b." or "b:" (or alone);
//   2. earliest exact choice-text occurrence;
//   3. abstain (nullopt).
// Full-width digits and letters are normalized before matching.
inline std::optional<std::size_t> extract_choice(const std::string& generation,
                                                 const std::vector<std::string>& choices) {
    const std::size_t n = choices.size();
    if (n == 0) return std::nullopt;
    std::string text = util::normalize_compat(generation);

    // rule 1: scan for a standalone label
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '1' && c <= '9') {
            std::size_t end = i;
            while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
            bool left_ok = i == 0 || !detail::is_alnum_ascii(text[i - 1]);
            bool right_ok = end == text.size() || !detail::is_alnum_ascii(text[end]);
            if (left_ok && right_ok) {
                std::size_t value = 0;
                bool overflow = end - i > 6;
                if (!overflow)
                    for (std::size_t k = i; k < end; ++k) value = value * 10 + static_cast<std::size_t>(text[k] - '0');
                if (!overflow && value >= 1 && value <= n) return value - 1;
            }
            i = end - 1;
            continue;
        }
        char lower = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        if (lower >= 'a' && lower < static_cast<char>('a' + std::min<std::size_t>(n, 26))) {
            bool left_alpha = i > 0 && detail::is_alnum_ascii(text[i - 1]);
            bool right_alpha = i + 1 < text.size() && detail::is_alnum_ascii(text[i + 1]);
            if (left_alpha || right_alpha) continue;  // part of a word
            bool adorned_left = i > 0 && text[i - 1] == '(';
            bool adorned_right =
                i + 1 < text.size() && (text[i + 1] == ')' || text[i + 1] == '.' || text[i + 1] == ':');
            bool alone = util::trim(text) == std::string(1, c);
            if (adorned_left || adorned_right || alone)
                return static_cast<std::size_t>(lower - 'a');
        }
    }

    // rule 2: earliest exact choice text
    std::optional<std::size_t> best;
    std::size_t best_pos = std::string::npos;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pos = generation.find(choices[i]);
        if (pos != std::string::npos && pos < best_pos) {
            best_pos = pos;
            best = i;
        }
    }
    return best;
}

struct PolarityKeywords {
    std::vector<std::string> positive{"positive", "ポジティブ", "肯定的", "プラス"};
    std::vector<std::string> negative{"negative", "ネガティブ", "否定的", "マイナス"};
    std::vector<std::string> neutral{"neutral", "ニュートラル", "中立"};
};

// First keyword occurrence (by position, ASCII case-insensitive) wins.
inline std::optional<Polarity> extract_polarity(const std::string& generation,
                                                const PolarityKeywords& keywords = {}) {
    std::string haystack = util::lower_ascii(generation);
    std::optional<Polarity> best;
    std::size_t best_pos = std::string::npos;
    auto scan = [&](const std::vector<std::string>& words, Polarity polarity) {
        for (const auto& w : words) {
            std::size_t pos = haystack.find(util::lower_ascii(w));
            if (pos != std::string::npos && pos < best_pos) {
                best_pos = pos;
                best = polarity;
            }
        }
    };
    scan(keywords.positive, Polarity::positive);
    scan(keywords.negative, Polarity::negative);
    scan(keywords.neutral, Polarity::neutral);
    return best;
}

// ---------------------------------------------------------------------------
// Benchmark run

struct AuditRecord {
    std::string task;
    std::string item_id;
    std::string prompt;
    std::string generation;
    std::string extraction;
    bool correct = false;
};

inline nlohmann::json to_json(const AuditRecord& a) {
    return nlohmann::json{{"task", a.task},       {"item_id", a.item_id},       {"prompt", a.prompt},
                          {"generation", a.generation}, {"extraction", a.extraction}, {"verdict", a.correct}};
}

struct BenchmarkOptions {
    int fewshots = 0;
    FewshotPool pool;
    Averaging f1_averaging = Averaging::micro;
    std::size_t workers = 1;
    PolarityKeywords keywords;
    // Per-item audit sink; called in dataset order as soon as a task's items
    // finish, so partial results survive a mid-run backend failure.
    std::function<void(const AuditRecord&)> audit;
};

// Prompts, generations and extractions per item. Worker errors are captured
// per row; the merge loop audits everything before the first failure, then
// rethrows it, so partial results survive a mid-run backend outage.
inline TaskScore run_task(const EvalTask& task, gen::GenerationBackend& backend,
                          const gen::GenerationConfig& config, const BenchmarkOptions& options = {}) {
    validate(config);
    if (task.metric == Metric::f1) {
        std::vector<std::optional<int>> preds(task.sentiment_items.size());
        std::vector<int> golds(task.sentiment_items.size());
        struct Row {
            std::string prompt, generation, extraction;
            std::optional<Polarity> polarity;
            std::exception_ptr error;
        };
        auto rows = util::parallel_ordered_map<Row>(
            task.sentiment_items.size(), options.workers, [&](std::size_t i) {
                Row row;
                try {
                    row.prompt = build_prompt(task, task.sentiment_items[i], options.fewshots, options.pool);
                    row.generation = backend.generate(row.prompt, config);
                    row.polarity = extract_polarity(row.generation, options.keywords);
                    row.extraction = row.polarity ? to_string(*row.polarity) : "abstain";
                } catch (...) {
                    row.error = std::current_exception();
                }
                return row;
            });
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].error) std::rethrow_exception(rows[i].error);
            golds[i] = static_cast<int>(task.sentiment_items[i].gold_polarity);
            preds[i] = rows[i].polarity ? std::optional<int>(static_cast<int>(*rows[i].polarity))
                                        : std::nullopt;
            if (options.audit)
                options.audit({task.name, task.sentiment_items[i].id, rows[i].prompt, rows[i].generation,
                               rows[i].extraction, preds[i] && *preds[i] == golds[i]});
        }
        return score_f1(preds, golds, 3, options.f1_averaging);
    }

    std::vector<std::optional<std::size_t>> preds(task.mcq_items.size());
    std::vector<std::size_t> golds(task.mcq_items.size());
    struct Row {
        std::string prompt, generation, extraction;
        std::optional<std::size_t> choice;
        std::exception_ptr error;
    };
    auto rows = util::parallel_ordered_map<Row>(task.mcq_items.size(), options.workers, [&](std::size_t i) {
        Row row;
        try {
            row.prompt = build_prompt(task, task.mcq_items[i], options.fewshots, options.pool);
            row.generation = backend.generate(row.prompt, config);
            row.choice = extract_choice(row.generation, task.mcq_items[i].choices);
            row.extraction = row.choice ? "(" + std::to_string(*row.choice + 1) + ")" : "abstain";
        } catch (...) {
            row.error = std::current_exception();
        }
        return row;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].error) std::rethrow_exception(rows[i].error);
        golds[i] = task.mcq_items[i].gold_index;
        preds[i] = rows[i].choice;
        if (options.audit)
            options.audit({task.name, task.mcq_items[i].id, rows[i].prompt, rows[i].generation,
                           rows[i].extraction, preds[i] && *preds[i] == golds[i]});
    }
    return score_accuracy(preds, golds);
}

inline BenchmarkReport run_benchmark(const std::vector<EvalTask>& tasks, gen::GenerationBackend& backend,
                                     const gen::GenerationConfig& config,
                                     const BenchmarkOptions& options = {}) {
    if (tasks.empty()) throw Error(ErrorCode::EmptyInput, "no tasks");
    std::map<std::string, TaskScore> per_task;
    for (const auto& task : tasks) per_task[task.name] = run_task(task, backend, config, options);
    return aggregate(backend.identity(), per_task);
}

}  // namespace finlm::eval
