#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finlm/errors.hpp"

namespace finlm::eval {

enum class Metric { f1, accuracy };

inline std::string to_string(Metric m) { return m == Metric::f1 ? "f1" : "accuracy"; }

inline Metric metric_from(const std::string& s) {
    if (s == "f1") return Metric::f1;
    if (s == "accuracy" || s == "acc") return Metric::accuracy;
    throw Error(ErrorCode::ParseError, "unknown metric: " + s);
}

struct TaskScore {
    double value = 0.0;
    std::optional<double> stderr_value;  // binomial standard error; accuracy only
    std::size_t n = 0;
    Metric metric = Metric::accuracy;

    bool operator==(const TaskScore&) const = default;
};

inline double binomial_stderr(double p, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::DomainError, "n must be >= 1");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Accuracy over choice predictions; abstentions (nullopt) count as incorrect
// so the denominator is always the dataset size.
inline TaskScore score_accuracy(const std::vector<std::optional<std::size_t>>& preds,
                                const std::vector<std::size_t>& golds) {
    if (preds.size() != golds.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                                   std::to_string(golds.size()) + " golds");
    if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] && *preds[i] == golds[i]) ++correct;
    TaskScore score;
    score.metric = Metric::accuracy;
    score.n = preds.size();
    score.value = static_cast<double>(correct) / static_cast<double>(preds.size());
    score.stderr_value = binomial_stderr(score.value, score.n);
    return score;
}

enum class Averaging { micro, macro };

// Multi-class F1 over label indices; abstentions are predictions of a
// reserved null class that never matches gold. Micro averaging counts the
// null class, so for single-label data micro-F1 equals accuracy. Macro
// averages per-class F1 over the real classes only.
inline TaskScore score_f1(const std::vector<std::optional<int>>& preds, const std::vector<int>& golds,
                          int num_classes, Averaging averaging = Averaging::micro) {
    if (preds.size() != golds.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                                   std::to_string(golds.size()) + " golds");
    if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
    if (num_classes < 1) throw Error(ErrorCode::DomainError, "num_classes must be >= 1");

    const int null_class = num_classes;  // reserved for abstentions
    std::vector<std::size_t> tp(static_cast<std::size_t>(num_classes) + 1, 0);
    std::vector<std::size_t> pred_count(static_cast<std::size_t>(num_classes) + 1, 0);
    std::vector<std::size_t> gold_count(static_cast<std::size_t>(num_classes) + 1, 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        int p = preds[i].value_or(null_class);
        int g = golds[i];
        if (p < 0 || p > null_class || g < 0 || g >= num_classes)
            throw Error(ErrorCode::DomainError, "label outside class range");
        ++pred_count[static_cast<std::size_t>(p)];
        ++gold_count[static_cast<std::size_t>(g)];
        if (p == g) ++tp[static_cast<std::size_t>(p)];
    }

    TaskScore score;
    score.metric = Metric::f1;
    score.n = preds.size();
    if (averaging == Averaging::micro) {
        std::size_t tp_sum = 0, pred_sum = 0, gold_sum = 0;
        for (std::size_t c = 0; c <= static_cast<std::size_t>(num_classes); ++c) {
            tp_sum += tp[c];
            pred_sum += pred_count[c];
            gold_sum += gold_count[c];
        }
        double precision = pred_sum == 0 ? 0.0 : static_cast<double>(tp_sum) / static_cast<double>(pred_sum);
        double recall = gold_sum == 0 ? 0.0 : static_cast<double>(tp_sum) / static_cast<double>(gold_sum);
        score.value = (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    } else {
        double sum = 0.0;
        for (std::size_t c = 0; c < static_cast<std::size_t>(num_classes); ++c) {
            double precision =
                pred_count[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(pred_count[c]);
            double recall =
                gold_count[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(gold_count[c]);
            sum += (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
        }
        score.value = sum / static_cast<double>(num_classes);
    }
    return score;
}

// ---------------------------------------------------------------------------
// Aggregation

// The benchmark's full task set; reports covering less are flagged partial.
inline const std::vector<std::string>& benchmark_task_names() {
    static const std::vector<std::string> names{"chabsa", "cma_basics", "cpa_audit", "fp2",
                                                "security_sales_1"};
    return names;
}

struct BenchmarkReport {
    std::string model_id;
    std::map<std::string, TaskScore> per_task;
    double overall = 0.0;
    bool partial = false;  // true when any of the five benchmark tasks is missing

    bool operator==(const BenchmarkReport&) const = default;
};

inline BenchmarkReport aggregate(const std::string& model_id,
                                 const std::map<std::string, TaskScore>& per_task) {
    if (per_task.empty()) throw Error(ErrorCode::EmptyInput, "no task scores");
    BenchmarkReport report;
    report.model_id = model_id;
    report.per_task = per_task;
    double sum = 0.0;
    for (const auto& [name, score] : per_task) sum += score.value;
    report.overall = sum / static_cast<double>(per_task.size());
    for (const auto& name : benchmark_task_names())
        if (!per_task.count(name)) report.partial = true;
    return report;
}

struct DiffReport {
    std::string tuned_id;
    std::string original_id;
    std::map<std::string, double> per_task;  // tuned - original
    double overall = 0.0;
};

inline DiffReport diff(const BenchmarkReport& tuned, const BenchmarkReport& original) {
    if (tuned.per_task.size() != original.per_task.size())
        throw Error(ErrorCode::TaskSetMismatch, "reports cover different task sets");
    DiffReport d;
    d.tuned_id = tuned.model_id;
    d.original_id = original.model_id;
    for (const auto& [name, score] : tuned.per_task) {
        auto it = original.per_task.find(name);
        if (it == original.per_task.end())
            throw Error(ErrorCode::TaskSetMismatch, "task missing from original report: " + name);
        d.per_task[name] = score.value - it->second.value;
    }
    d.overall = tuned.overall - original.overall;
    return d;
}

// ---------------------------------------------------------------------------
// Serialization and table rendering

inline nlohmann::json to_json(const TaskScore& s) {
    nlohmann::json j{{"value", s.value}, {"n", s.n}, {"metric", to_string(s.metric)}};
    if (s.stderr_value) j["stderr"] = *s.stderr_value;
    return j;
}

inline TaskScore task_score_from_json(const nlohmann::json& j) {
    TaskScore s;
    s.value = j.at("value").get<double>();
    s.n = j.value("n", std::size_t{0});
    s.metric = metric_from(j.value("metric", std::string("accuracy")));
    if (j.contains("stderr")) s.stderr_value = j.at("stderr").get<double>();
    return s;
}

inline nlohmann::json to_json(const BenchmarkReport& r) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [name, score] : r.per_task) per[name] = to_json(score);
    return nlohmann::json{
        {"model_id", r.model_id}, {"per_task", per}, {"overall", r.overall}, {"partial", r.partial}};
}

inline BenchmarkReport benchmark_report_from_json(const nlohmann::json& j) {
    BenchmarkReport r;
    r.model_id = j.at("model_id").get<std::string>();
    for (const auto& [name, score] : j.at("per_task").items()) r.per_task[name] = task_score_from_json(score);
    r.overall = j.at("overall").get<double>();
    r.partial = j.value("partial", false);
    return r;
}

inline std::string format_score(double v, int decimals = 4) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::string format_signed(double v, int decimals = 4) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.*f", decimals, v);
    return buf;
}

// Markdown table: one row per model (score +/- stderr where present), columns
// per task plus Overall, and an optional diff row for exactly two models.
inline std::string render_benchmark_table(const std::vector<BenchmarkReport>& reports,
                                          bool include_diff = true) {
    if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports");
    std::vector<std::string> tasks;
    for (const auto& [name, score] : reports.front().per_task) tasks.push_back(name);

    std::string out = "| Model |";
    for (const auto& t : tasks) {
        Metric m = reports.front().per_task.at(t).metric;
        out += " " + t + " (" + (m == Metric::f1 ? "f1" : "acc") + ") |";
    }
    out += " Overall |\n|---|";
    for (std::size_t i = 0; i < tasks.size(); ++i) out += "---|";
    out += "---|\n";

    for (const auto& r : reports) {
        out += "| " + r.model_id + " |";
        for (const auto& t : tasks) {
            auto it = r.per_task.find(t);
            if (it == r.per_task.end()) throw Error(ErrorCode::TaskSetMismatch, "task missing: " + t);
            out += " " + format_score(it->second.value);
            if (it->second.stderr_value) out += "±" + format_score(*it->second.stderr_value);
            out += " |";
        }
        out += " " + format_score(r.overall) + " |\n";
    }

    if (include_diff && reports.size() == 2) {
        DiffReport d = diff(reports[0], reports[1]);
        out += "| Diff |";
        for (const auto& t : tasks) out += " " + format_signed(d.per_task.at(t)) + " |";
        out += " " + format_signed(d.overall) + " |\n";
    }
    return out;
}

}  // namespace finlm::eval
