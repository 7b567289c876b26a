#pragma once

#include <regex>
#include <string>
#include <vector>

#include "finlm/corpus.hpp"
#include "finlm/errors.hpp"
#include "finlm/util.hpp"

namespace finlm::corpus {

// Rule-based cleaning: compatibility normalization, whitespace collapsing and
// a configurable list of boilerplate line patterns. The whole pass is
// idempotent: its output contains no foldable code points, no runs of
// horizontal whitespace, no blank lines and no boilerplate lines.
struct CleaningConfig {
    // ECMAScript regexes matched against whole (already normalized, trimmed)
    // lines; a match drops the line.
    std::vector<std::string> boilerplate_patterns;
};

namespace detail {

inline std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns) {
    std::vector<std::regex> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) out.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
    return out;
}

inline std::string collapse_line_ws(std::string_view line) {
    std::string out;
    out.reserve(line.size());
    bool in_ws = false;
    for (char c : line) {
        if (c == ' ' || c == '\t') {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace detail

namespace detail {

inline std::string clean_lines(const std::string& body, const CleaningConfig& config,
                               bool keep_paragraph_breaks) {
    auto patterns = compile_patterns(config.boilerplate_patterns);
    std::string normalized = util::normalize_compat(body);

    std::vector<std::string> kept;
    for (const auto& raw_line : util::split_lines(normalized)) {
        std::string line = collapse_line_ws(util::trim(raw_line));
        if (line.empty()) {
            if (keep_paragraph_breaks && !kept.empty() && !kept.back().empty()) kept.emplace_back();
            continue;
        }
        bool boilerplate = false;
        for (const auto& re : patterns) {
            if (std::regex_match(line, re)) {
                boilerplate = true;
                break;
            }
        }
        if (!boilerplate) kept.push_back(std::move(line));
    }
    while (!kept.empty() && kept.back().empty()) kept.pop_back();

    if (kept.empty())
        throw Error(ErrorCode::EmptyAfterCleaning, "no content left after cleaning");
    return util::join_lines(kept);
}

}  // namespace detail

inline std::string clean_text(const std::string& body, const CleaningConfig& config = {}) {
    return detail::clean_lines(body, config, /*keep_paragraph_breaks=*/false);
}

inline std::string clean_text(const RawDocument& raw, const CleaningConfig& config = {}) {
    return clean_text(raw.body, config);
}

// Same normalization, whitespace and boilerplate rules, but blank-line runs
// collapse to a single blank line instead of disappearing. Used before
// format conversion, where blank lines carry paragraph and block structure.
inline std::string clean_text_preserving_structure(const std::string& body,
                                                   const CleaningConfig& config = {}) {
    return detail::clean_lines(body, config, /*keep_paragraph_breaks=*/true);
}

}  // namespace finlm::corpus
