#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "finlm/errors.hpp"
#include "finlm/generation.hpp"
#include "finlm/tokenizer.hpp"
#include "finlm/util.hpp"

namespace finlm::cmp {

struct ComparisonCase {
    std::string prompt;
    std::string model_a;
    std::string model_b;
    std::string output_a;
    std::string output_b;
    bool a_ok = false;
    bool b_ok = false;
    std::size_t chars_a = 0;
    std::size_t chars_b = 0;
    std::size_t tokens_a = 0;
    std::size_t tokens_b = 0;
};

// Sends every prompt to both backends under one GenerationConfig. A backend
// failure marks that side of the case failed; the run continues.
inline std::vector<ComparisonCase> compare_outputs(const std::vector<std::string>& prompts,
                                                   gen::GenerationBackend& backend_a,
                                                   gen::GenerationBackend& backend_b,
                                                   const gen::GenerationConfig& config,
                                                   const Tokenizer& tokenizer,
                                                   std::size_t workers = 1) {
    validate(config);
    auto cases = util::parallel_ordered_map<ComparisonCase>(prompts.size(), workers, [&](std::size_t i) {
        ComparisonCase c;
        c.prompt = prompts[i];
        c.model_a = backend_a.identity();
        c.model_b = backend_b.identity();
        try {
            c.output_a = backend_a.generate(prompts[i], config);
            c.a_ok = true;
        } catch (...) {
            c.a_ok = false;
        }
        try {
            c.output_b = backend_b.generate(prompts[i], config);
            c.b_ok = true;
        } catch (...) {
            c.b_ok = false;
        }
        c.chars_a = util::utf8_length(c.output_a);
        c.chars_b = util::utf8_length(c.output_b);
        c.tokens_a = tokenizer.encode(c.output_a).size();
        c.tokens_b = tokenizer.encode(c.output_b).size();
        return c;
    });
    return cases;
}

struct LengthStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double median = 0.0;
    double mean = 0.0;
    std::size_t total = 0;
};

inline LengthStats length_stats(std::vector<std::size_t> values) {
    LengthStats stats;
    if (values.empty()) return stats;
    std::sort(values.begin(), values.end());
    stats.min = values.front();
    stats.max = values.back();
    std::size_t n = values.size();
    stats.median = n % 2 == 1 ? static_cast<double>(values[n / 2])
                              : 0.5 * static_cast<double>(values[n / 2 - 1] + values[n / 2]);
    for (auto v : values) stats.total += v;
    stats.mean = static_cast<double>(stats.total) / static_cast<double>(n);
    return stats;
}

namespace detail {

inline std::string prompt_title(const std::string& prompt, std::size_t max_cps = 48) {
    std::string title;
    std::size_t i = 0, count = 0;
    while (i < prompt.size() && count < max_cps) {
        char32_t cp = util::utf8_next(prompt, i);
        if (cp == '\n') break;
        util::utf8_append(title, cp);
        ++count;
    }
    if (i < prompt.size()) title += "...";
    return title;
}

inline std::string fmt_stat(double v) {
    std::string s = util::format_double(v);
    return s;
}

}  // namespace detail

// Markdown report: one section per case with both outputs, then a summary
// table of output lengths per model (characters and tokens).
inline std::string render_comparison(const std::vector<ComparisonCase>& cases) {
    if (cases.empty()) throw Error(ErrorCode::EmptyInput, "no comparison cases");

    std::string out = "# Output comparison\n";
    std::vector<std::size_t> chars_a, chars_b, tokens_a, tokens_b;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        out += "\n## Case " + std::to_string(i + 1) + ": " + detail::prompt_title(c.prompt) + "\n\n";
        out += "**" + c.model_a + ":**\n\n";
        out += c.a_ok ? c.output_a : "(generation failed)";
        out += "\n\n---\n\n";
        out += "**" + c.model_b + ":**\n\n";
        out += c.b_ok ? c.output_b : "(generation failed)";
        out += "\n";
        if (c.a_ok) {
            chars_a.push_back(c.chars_a);
            tokens_a.push_back(c.tokens_a);
        }
        if (c.b_ok) {
            chars_b.push_back(c.chars_b);
            tokens_b.push_back(c.tokens_b);
        }
    }

    auto row = [](const std::string& label, const LengthStats& s) {
        return "| " + label + " | " + std::to_string(s.min) + " | " + detail::fmt_stat(s.median) + " | " +
               detail::fmt_stat(s.mean) + " | " + std::to_string(s.max) + " | " + std::to_string(s.total) +
               " |\n";
    };
    out += "\n## Output length summary\n\n";
    out += "| Model / unit | min | median | mean | max | total |\n|---|---|---|---|---|---|\n";
    out += row(cases.front().model_a + " (chars)", length_stats(chars_a));
    out += row(cases.front().model_b + " (chars)", length_stats(chars_b));
    out += row(cases.front().model_a + " (tokens)", length_stats(tokens_a));
    out += row(cases.front().model_b + " (tokens)", length_stats(tokens_b));
    return out;
}

inline nlohmann::json to_json(const ComparisonCase& c) {
    return nlohmann::json{{"prompt", c.prompt},   {"model_a", c.model_a}, {"model_b", c.model_b},
                          {"output_a", c.output_a}, {"output_b", c.output_b}, {"a_ok", c.a_ok},
                          {"b_ok", c.b_ok},       {"chars_a", c.chars_a}, {"chars_b", c.chars_b},
                          {"tokens_a", c.tokens_a}, {"tokens_b", c.tokens_b}};
}

}  // namespace finlm::cmp
