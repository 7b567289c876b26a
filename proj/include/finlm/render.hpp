#pragma once

#include <regex>
#include <string>
#include <vector>

#include "finlm/corpus.hpp"
#include "finlm/errors.hpp"
#include "finlm/util.hpp"

namespace finlm::corpus {

// Default stock-code pattern: 4-5 digit listings. Configurable per call.
inline constexpr const char* kDefaultStockCodePattern = "[0-9]{4,5}";

// Category record template, frozen by golden tests:
//   # <name>
//   <description>
//   - <company> (<code>)     one line per stock, input order
inline CorpusRecord render_category(const CategoryEntry& entry, const std::string& id,
                                    const std::string& code_pattern = kDefaultStockCodePattern) {
    if (entry.name.empty()) throw Error(ErrorCode::InvalidEntry, "category name is empty");
    std::regex code_re(code_pattern, std::regex::ECMAScript);
    for (const auto& [name, code] : entry.stocks) {
        if (name.empty()) throw Error(ErrorCode::InvalidEntry, "stock with empty name in " + entry.name);
        if (!std::regex_match(code, code_re))
            throw Error(ErrorCode::InvalidEntry, "stock code '" + code + "' does not match pattern");
    }
    std::string text = "# " + entry.name;
    if (!entry.description.empty()) text += "\n" + entry.description;
    for (const auto& [name, code] : entry.stocks) text += "\n- " + name + " (" + code + ")";

    CorpusRecord record;
    record.id = id;
    record.format_kind = FormatKind::category;
    record.text = std::move(text);
    record.provenance = {id};
    return record;
}

namespace detail {

// Company-list fields are comma separated; commas and backslashes inside a
// field are backslash-escaped.
inline std::string escape_field(const std::string& field) {
    std::string out;
    out.reserve(field.size());
    for (char c : field) {
        if (c == ',' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace detail

// List record template: "<name>, <code>, <industry>" per line.
inline CorpusRecord render_company_list(const std::vector<CompanyRow>& rows, const std::string& id) {
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no company rows");
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.name.empty() || row.code.empty() || row.industry.empty())
            throw Error(ErrorCode::InvalidEntry, "company row with empty field");
        lines.push_back(detail::escape_field(row.name) + ", " + detail::escape_field(row.code) + ", " +
                        detail::escape_field(row.industry));
    }
    CorpusRecord record;
    record.id = id;
    record.format_kind = FormatKind::company_list;
    record.text = util::join_lines(lines);
    record.provenance = {id};
    return record;
}

// MCQ choices are labeled "(1)".."(N)"; the answer line restates the correct
// choice by label and text. Shared by the synthetic-generation layout.
inline std::string choice_label(std::size_t index) {
    return "(" + std::to_string(index + 1) + ")";
}

inline std::string render_qa_text(const QAPair& item) {
    return "Q: " + item.question + "\nA: " + item.answer;
}

inline std::string render_mcq_text(const MCQItem& item) {
    std::string text = "Q: " + item.question;
    for (std::size_t i = 0; i < item.choices.size(); ++i)
        text += "\n" + choice_label(i) + " " + item.choices[i];
    text += "\nA: " + choice_label(item.answer_index) + " " + item.choices[item.answer_index];
    return text;
}

inline void check_item(const QAPair& item) {
    if (item.question.empty() || item.answer.empty())
        throw Error(ErrorCode::InvalidItem, "qa item with empty field");
}

inline void check_item(const MCQItem& item) {
    if (item.question.empty()) throw Error(ErrorCode::InvalidItem, "mcq item with empty question");
    if (item.choices.size() < 2) throw Error(ErrorCode::InvalidItem, "mcq item needs at least 2 choices");
    if (item.answer_index >= item.choices.size())
        throw Error(ErrorCode::InvalidItem, "mcq answer_index out of range");
    for (std::size_t i = 0; i < item.choices.size(); ++i) {
        if (item.choices[i].empty()) throw Error(ErrorCode::InvalidItem, "mcq item with empty choice");
        for (std::size_t k = i + 1; k < item.choices.size(); ++k)
            if (item.choices[i] == item.choices[k])
                throw Error(ErrorCode::InvalidItem, "mcq item with duplicate choices");
    }
}

inline CorpusRecord render_synthetic(const QAPair& item, const std::string& id,
                                     const std::vector<std::string>& provenance) {
    check_item(item);
    CorpusRecord record;
    record.id = id;
    record.format_kind = FormatKind::qa;
    record.text = render_qa_text(item);
    record.provenance = provenance.empty() ? std::vector<std::string>{id} : provenance;
    return record;
}

inline CorpusRecord render_synthetic(const MCQItem& item, const std::string& id,
                                     const std::vector<std::string>& provenance) {
    check_item(item);
    CorpusRecord record;
    record.id = id;
    record.format_kind = FormatKind::mcq;
    record.text = render_mcq_text(item);
    record.provenance = provenance.empty() ? std::vector<std::string>{id} : provenance;
    return record;
}

}  // namespace finlm::corpus
