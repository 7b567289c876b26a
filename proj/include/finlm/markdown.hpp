#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "finlm/corpus.hpp"
#include "finlm/errors.hpp"
#include "finlm/tokenizer.hpp"
#include "finlm/util.hpp"

namespace finlm::corpus {

namespace detail {

inline std::string decode_entities(std::string s) {
    s = util::replace_all(std::move(s), "&nbsp;", " ");
    s = util::replace_all(std::move(s), "&lt;", "<");
    s = util::replace_all(std::move(s), "&gt;", ">");
    s = util::replace_all(std::move(s), "&quot;", "\"");
    s = util::replace_all(std::move(s), "&apos;", "'");
    s = util::replace_all(std::move(s), "&#39;", "'");
    s = util::replace_all(std::move(s), "&amp;", "&");
    return s;
}

// Collapse HTML whitespace runs to single spaces.
inline void append_html_text(std::string& buf, std::string_view text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!buf.empty() && buf.back() != ' ' && buf.back() != '\n') buf.push_back(' ');
        } else {
            buf.push_back(c);
        }
    }
}

struct HtmlToMarkdown {
    std::vector<std::string> blocks;
    std::string inline_buf;
    int heading_level = 0;

    // list state: one entry per open <ul>/<ol>
    struct ListLevel {
        bool ordered = false;
        int counter = 0;
    };
    std::vector<ListLevel> lists;
    std::vector<std::string> list_lines;
    std::string item_buf;
    bool in_item = false;

    // table state
    bool in_table = false;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> current_row;
    std::string cell_buf;
    bool in_cell = false;

    std::string& sink() {
        if (in_cell) return cell_buf;
        if (in_item) return item_buf;
        return inline_buf;
    }

    void flush_inline() {
        std::string text(util::trim(inline_buf));
        inline_buf.clear();
        if (!text.empty()) blocks.push_back(std::move(text));
    }

    void flush_item() {
        if (!in_item) return;
        std::string text(util::trim(item_buf));
        item_buf.clear();
        in_item = false;
        if (text.empty()) return;
        std::string indent(lists.empty() ? 0 : 2 * (lists.size() - 1), ' ');
        std::string marker = "- ";
        if (!lists.empty() && lists.back().ordered) {
            marker = std::to_string(++lists.back().counter) + ". ";
        }
        list_lines.push_back(indent + marker + text);
    }

    void flush_list() {
        if (list_lines.empty()) return;
        blocks.push_back(util::join_lines(list_lines));
        list_lines.clear();
    }

    void flush_cell() {
        if (!in_cell) return;
        current_row.push_back(std::string(util::trim(cell_buf)));
        cell_buf.clear();
        in_cell = false;
    }

    void flush_row() {
        flush_cell();
        if (!current_row.empty()) {
            rows.push_back(std::move(current_row));
            current_row.clear();
        }
    }

    void flush_table() {
        flush_row();
        in_table = false;
        if (rows.empty()) return;
        std::vector<std::string> lines;
        std::size_t width = 0;
        for (const auto& r : rows) width = std::max(width, r.size());
        auto render_row = [&](const std::vector<std::string>& r) {
            std::string line = "|";
            for (std::size_t i = 0; i < width; ++i) {
                line += " ";
                if (i < r.size()) line += r[i];
                line += " |";
            }
            return line;
        };
        lines.push_back(render_row(rows[0]));
        std::string sep = "|";
        for (std::size_t i = 0; i < width; ++i) sep += " --- |";
        lines.push_back(sep);
        for (std::size_t i = 1; i < rows.size(); ++i) lines.push_back(render_row(rows[i]));
        rows.clear();
        blocks.push_back(util::join_lines(lines));
    }

    void open_tag(const std::string& name) {
        if (name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6') {
            flush_inline();
            heading_level = name[1] - '0';
        } else if (name == "p" || name == "div" || name == "section" || name == "article") {
            flush_inline();
        } else if (name == "ul" || name == "ol") {
            flush_item();
            if (lists.empty()) flush_inline();
            lists.push_back({name == "ol", 0});
        } else if (name == "li") {
            flush_item();
            in_item = true;
        } else if (name == "table") {
            flush_inline();
            in_table = true;
        } else if (name == "tr") {
            flush_row();
        } else if (name == "td" || name == "th") {
            flush_cell();
            in_cell = true;
        } else if (name == "br") {
            sink().push_back('\n');
        }
    }

    void close_tag(const std::string& name) {
        if (name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6') {
            int level = heading_level > 0 ? heading_level : name[1] - '0';
            std::string text(util::trim(inline_buf));
            inline_buf.clear();
            heading_level = 0;
            if (!text.empty()) blocks.push_back(std::string(level, '#') + " " + text);
        } else if (name == "p" || name == "div" || name == "section" || name == "article") {
            flush_inline();
        } else if (name == "li") {
            flush_item();
        } else if (name == "ul" || name == "ol") {
            flush_item();
            if (!lists.empty()) lists.pop_back();
            if (lists.empty()) flush_list();
        } else if (name == "tr") {
            flush_row();
        } else if (name == "td" || name == "th") {
            flush_cell();
        } else if (name == "table") {
            flush_table();
        }
    }

    std::string run(std::string_view html) {
        std::size_t i = 0;
        while (i < html.size()) {
            if (html[i] == '<') {
                std::size_t end = html.find('>', i);
                if (end == std::string_view::npos) {
                    append_html_text(sink(), decode_entities(std::string(html.substr(i))));
                    break;
                }
                std::string tag(html.substr(i + 1, end - i - 1));
                i = end + 1;
                if (util::starts_with(tag, "!--")) continue;  // comment
                bool closing = !tag.empty() && tag[0] == '/';
                if (closing) tag.erase(0, 1);
                std::size_t name_end = 0;
                while (name_end < tag.size() && !std::isspace(static_cast<unsigned char>(tag[name_end])) &&
                       tag[name_end] != '/')
                    ++name_end;
                std::string name = util::lower_ascii(tag.substr(0, name_end));
                if (name.empty()) continue;
                if (!closing && (name == "script" || name == "style")) {
                    std::string close = "</" + name;
                    std::size_t skip = html.find(close, i);
                    if (skip == std::string_view::npos) break;
                    std::size_t skip_end = html.find('>', skip);
                    i = skip_end == std::string_view::npos ? html.size() : skip_end + 1;
                    continue;
                }
                if (closing) {
                    close_tag(name);
                } else {
                    open_tag(name);
                    // void elements that also appear self-closed
                    if (!tag.empty() && tag.back() == '/' && name != "br") close_tag(name);
                }
            } else {
                std::size_t next = html.find('<', i);
                if (next == std::string_view::npos) next = html.size();
                append_html_text(sink(), decode_entities(std::string(html.substr(i, next - i))));
                i = next;
            }
        }
        flush_item();
        flush_list();
        if (in_table) flush_table();
        flush_inline();
        std::string out;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (b) out += "\n\n";
            out += blocks[b];
        }
        return out;
    }
};

inline std::string html_to_markdown(std::string_view html) {
    return HtmlToMarkdown{}.run(html);
}

// De-hyphenates line-broken words and reflows paragraphs: single newlines
// join with a space, blank lines separate paragraphs.
inline std::string pdf_text_to_markdown(std::string_view text) {
    auto lines = util::split_lines(text);
    std::vector<std::string> paragraphs;
    std::string current;
    bool join_tight = false;  // previous line ended in a hyphenated break
    auto is_letter = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
    for (const auto& raw : lines) {
        std::string line(util::trim(raw));
        if (line.empty()) {
            if (!current.empty()) {
                paragraphs.push_back(std::move(current));
                current.clear();
            }
            join_tight = false;
            continue;
        }
        if (current.empty()) {
            current = line;
        } else if (join_tight) {
            current += line;
        } else {
            current += ' ';
            current += line;
        }
        join_tight = false;
        if (current.size() >= 2 && current.back() == '-' && is_letter(current[current.size() - 2])) {
            current.pop_back();
            join_tight = true;
        }
    }
    if (!current.empty()) paragraphs.push_back(std::move(current));
    std::string out;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        if (i) out += "\n\n";
        out += paragraphs[i];
    }
    return out;
}

inline std::string wiki_to_markdown(std::string_view text) {
    auto lines = util::split_lines(text);
    std::vector<std::string> out_lines;
    for (auto& line : lines) {
        std::string s = line;
        // [[target|label]] -> label, [[target]] -> target
        std::size_t pos;
        while ((pos = s.find("[[")) != std::string::npos) {
            std::size_t end = s.find("]]", pos);
            if (end == std::string::npos) break;
            std::string inner = s.substr(pos + 2, end - pos - 2);
            std::size_t bar = inner.find('|');
            if (bar != std::string::npos) inner = inner.substr(bar + 1);
            s.replace(pos, end - pos + 2, inner);
        }
        // {{template}} -> removed
        while ((pos = s.find("{{")) != std::string::npos) {
            std::size_t end = s.find("}}", pos);
            if (end == std::string::npos) break;
            s.erase(pos, end - pos + 2);
        }
        s = util::replace_all(std::move(s), "'''", "");
        s = util::replace_all(std::move(s), "''", "");

        std::string_view sv = util::trim(s);
        if (sv.size() >= 4 && sv.front() == '=' && sv.back() == '=') {
            std::size_t level = 0;
            while (level < sv.size() && sv[level] == '=') ++level;
            std::size_t tail = 0;
            while (tail < sv.size() && sv[sv.size() - 1 - tail] == '=') ++tail;
            if (level >= 1 && tail >= 1 && level + tail < sv.size()) {
                std::string title(util::trim(sv.substr(level, sv.size() - level - tail)));
                out_lines.push_back(std::string(std::min<std::size_t>(level, 6), '#') + " " + title);
                continue;
            }
        }
        if (!sv.empty() && sv.front() == '*') {
            out_lines.push_back("- " + std::string(util::trim(sv.substr(1))));
            continue;
        }
        out_lines.push_back(std::string(sv));
    }
    // collapse runs of blank lines
    std::vector<std::string> collapsed;
    for (auto& l : out_lines) {
        if (l.empty() && (collapsed.empty() || collapsed.back().empty())) continue;
        collapsed.push_back(std::move(l));
    }
    while (!collapsed.empty() && collapsed.back().empty()) collapsed.pop_back();
    return util::join_lines(collapsed);
}

}  // namespace detail

inline CorpusRecord to_markdown(const RawDocument& raw) {
    std::string text;
    switch (raw.mime) {
        case Mime::html: text = detail::html_to_markdown(raw.body); break;
        case Mime::pdf_text: text = detail::pdf_text_to_markdown(raw.body); break;
        case Mime::plain: text = raw.body; break;
        case Mime::wiki_dump: text = detail::wiki_to_markdown(raw.body); break;
        default: throw Error(ErrorCode::UnsupportedMime, "document " + raw.id);
    }
    CorpusRecord record;
    record.id = raw.id;
    record.format_kind = FormatKind::markdown;
    record.text = std::move(text);
    record.provenance = {raw.id};
    return record;
}

// ---------------------------------------------------------------------------
// Section-wise consolidation

struct SectionOptions {
    int heading_level = 2;
    bool strict = false;
};

// Splits a markdown document at headings of the configured level. Every
// record is prefixed with the document title and its section title; content
// before the first section heading becomes a title-only record. Without any
// heading at that level the whole body is returned as a single record
// (strict mode raises NoSections instead). An empty body yields no records
// in non-strict mode.
inline std::vector<CorpusRecord> consolidate_sections(std::string_view markdown,
                                                      const std::string& doc_id,
                                                      const std::string& doc_title,
                                                      const SectionOptions& opts = {}) {
    const std::string marker = std::string(static_cast<std::size_t>(opts.heading_level), '#') + " ";
    auto lines = util::split_lines(markdown);

    bool any_heading = false;
    for (const auto& line : lines) {
        if (util::starts_with(line, marker)) {
            any_heading = true;
            break;
        }
    }
    if (!any_heading) {
        if (opts.strict)
            throw Error(ErrorCode::NoSections,
                        "no level-" + std::to_string(opts.heading_level) + " heading in " + doc_id);
        if (util::trim(markdown).empty()) return {};
        CorpusRecord record;
        record.id = doc_id + "#s0";
        record.format_kind = FormatKind::section;
        record.text = std::string(markdown);
        record.provenance = {doc_id};
        return {record};
    }

    struct Section {
        std::string title;
        std::vector<std::string> body;
    };
    std::vector<Section> sections;
    sections.push_back({});  // preamble
    for (const auto& line : lines) {
        if (util::starts_with(line, marker)) {
            sections.push_back({std::string(util::trim(line.substr(marker.size()))), {}});
        } else {
            sections.back().body.push_back(line);
        }
    }

    // the record prefix restates the document title; drop a leading level-1
    // heading from the preamble so it does not appear twice
    {
        auto& pre = sections.front().body;
        std::size_t first = 0;
        while (first < pre.size() && util::trim(pre[first]).empty()) ++first;
        if (first < pre.size() && util::starts_with(util::trim(pre[first]), "# "))
            pre.erase(pre.begin(), pre.begin() + static_cast<std::ptrdiff_t>(first) + 1);
    }

    auto has_content = [](const Section& s) {
        for (const auto& l : s.body)
            if (!util::trim(l).empty()) return true;
        return false;
    };

    std::vector<CorpusRecord> records;
    std::size_t index = 0;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        const bool is_preamble = (i == 0);
        if (is_preamble && !has_content(sections[i])) continue;
        CorpusRecord record;
        record.id = doc_id + "#s" + std::to_string(index++);
        record.format_kind = FormatKind::section;
        std::string text = "# " + doc_title;
        if (!is_preamble) text += "\n\n" + marker + sections[i].title;
        std::string body = util::join_lines(sections[i].body);
        std::string_view trimmed = util::trim(body);
        if (!trimmed.empty()) text += "\n\n" + std::string(trimmed);
        record.text = std::move(text);
        record.provenance = {doc_id};
        records.push_back(std::move(record));
    }
    return records;
}

// Document title: the first "# " heading when present, else the fallback.
inline std::string derive_title(std::string_view markdown, const std::string& fallback) {
    for (const auto& line : util::split_lines(markdown)) {
        std::string_view sv = util::trim(line);
        if (util::starts_with(sv, "# ")) return std::string(util::trim(sv.substr(2)));
        if (!sv.empty()) break;
    }
    return fallback;
}

// Fills token counts from the tokenizer; records keep their other fields.
inline void assign_token_counts(std::vector<CorpusRecord>& records, const Tokenizer& tokenizer) {
    for (auto& r : records) r.token_count = tokenizer.encode(r.text).size();
}

}  // namespace finlm::corpus
