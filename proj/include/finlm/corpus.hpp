#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "finlm/errors.hpp"
#include "finlm/util.hpp"

namespace finlm::corpus {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Enums

enum class SourceKind {
    boj_speech,
    boj_minutes,
    institution_report,
    glossary,
    company_profile,
    wikipedia,
    edinet_report,
    other,
};

enum class Mime { html, pdf_text, plain, wiki_dump };

enum class FormatKind { markdown, section, category, company_list, qa, mcq };

inline constexpr std::size_t kFormatCount = 6;

inline std::string to_string(SourceKind k) {
    switch (k) {
        case SourceKind::boj_speech: return "boj_speech";
        case SourceKind::boj_minutes: return "boj_minutes";
        case SourceKind::institution_report: return "institution_report";
        case SourceKind::glossary: return "glossary";
        case SourceKind::company_profile: return "company_profile";
        case SourceKind::wikipedia: return "wikipedia";
        case SourceKind::edinet_report: return "edinet_report";
        case SourceKind::other: return "other";
    }
    return "other";
}

inline SourceKind source_kind_from(const std::string& s) {
    if (s == "boj_speech") return SourceKind::boj_speech;
    if (s == "boj_minutes") return SourceKind::boj_minutes;
    if (s == "institution_report") return SourceKind::institution_report;
    if (s == "glossary") return SourceKind::glossary;
    if (s == "company_profile") return SourceKind::company_profile;
    if (s == "wikipedia") return SourceKind::wikipedia;
    if (s == "edinet_report") return SourceKind::edinet_report;
    if (s == "other") return SourceKind::other;
    throw Error(ErrorCode::ParseError, "unknown source_kind: " + s);
}

inline std::string to_string(Mime m) {
    switch (m) {
        case Mime::html: return "html";
        case Mime::pdf_text: return "pdf_text";
        case Mime::plain: return "plain";
        case Mime::wiki_dump: return "wiki_dump";
    }
    return "plain";
}

inline Mime mime_from(const std::string& s) {
    if (s == "html") return Mime::html;
    if (s == "pdf_text") return Mime::pdf_text;
    if (s == "plain") return Mime::plain;
    if (s == "wiki_dump") return Mime::wiki_dump;
    throw Error(ErrorCode::UnsupportedMime, "unknown mime: " + s);
}

inline std::string to_string(FormatKind k) {
    switch (k) {
        case FormatKind::markdown: return "markdown";
        case FormatKind::section: return "section";
        case FormatKind::category: return "category";
        case FormatKind::company_list: return "company_list";
        case FormatKind::qa: return "qa";
        case FormatKind::mcq: return "mcq";
    }
    return "markdown";
}

inline FormatKind format_kind_from(const std::string& s) {
    if (s == "markdown") return FormatKind::markdown;
    if (s == "section") return FormatKind::section;
    if (s == "category") return FormatKind::category;
    if (s == "company_list") return FormatKind::company_list;
    if (s == "qa") return FormatKind::qa;
    if (s == "mcq") return FormatKind::mcq;
    throw Error(ErrorCode::ParseError, "unknown format_kind: " + s);
}

// ---------------------------------------------------------------------------
// Domain types

struct RawDocument {
    std::string id;
    SourceKind source_kind = SourceKind::other;
    Mime mime = Mime::plain;
    std::string uri;
    std::string body;
    std::map<std::string, std::string> metadata;
};

struct CorpusRecord {
    std::string id;
    FormatKind format_kind = FormatKind::markdown;
    std::string text;
    std::optional<std::uint64_t> token_count;
    std::vector<std::string> provenance;

    bool operator==(const CorpusRecord&) const = default;
};

struct CategoryEntry {
    std::string name;
    std::string description;
    std::vector<std::pair<std::string, std::string>> stocks;  // (company name, stock code)
};

struct CompanyRow {
    std::string name;
    std::string code;
    std::string industry;
};

struct QAPair {
    std::string question;
    std::string answer;

    bool operator==(const QAPair&) const = default;
};

struct MCQItem {
    std::string question;
    std::vector<std::string> choices;
    std::size_t answer_index = 0;

    bool operator==(const MCQItem&) const = default;
};

struct CorpusStats {
    std::uint64_t doc_count = 0;
    std::uint64_t token_count = 0;
    std::map<std::string, std::uint64_t> per_format;
};

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const RawDocument& d) {
    json meta = json::object();
    for (const auto& [k, v] : d.metadata) meta[k] = v;
    return json{{"id", d.id},
                {"source_kind", to_string(d.source_kind)},
                {"mime", to_string(d.mime)},
                {"uri", d.uri},
                {"body", d.body},
                {"metadata", meta}};
}

inline RawDocument raw_document_from_json(const json& j) {
    RawDocument d;
    d.id = j.at("id").get<std::string>();
    d.source_kind = source_kind_from(j.at("source_kind").get<std::string>());
    d.mime = mime_from(j.at("mime").get<std::string>());
    d.uri = j.value("uri", std::string{});
    d.body = j.at("body").get<std::string>();
    if (j.contains("metadata")) {
        for (const auto& [k, v] : j.at("metadata").items()) d.metadata[k] = v.get<std::string>();
    }
    if (d.id.empty()) throw Error(ErrorCode::InvalidDocument, "document id is empty");
    if (d.body.empty()) throw Error(ErrorCode::InvalidDocument, "document body is empty: " + d.id);
    return d;
}

inline json to_json(const CorpusRecord& r) {
    json j{{"id", r.id},
           {"format_kind", to_string(r.format_kind)},
           {"text", r.text},
           {"provenance", r.provenance}};
    if (r.token_count) j["token_count"] = *r.token_count;
    return j;
}

inline CorpusRecord corpus_record_from_json(const json& j) {
    CorpusRecord r;
    r.id = j.at("id").get<std::string>();
    r.format_kind = format_kind_from(j.at("format_kind").get<std::string>());
    r.text = j.at("text").get<std::string>();
    if (j.contains("token_count")) r.token_count = j.at("token_count").get<std::uint64_t>();
    r.provenance = j.at("provenance").get<std::vector<std::string>>();
    return r;
}

inline json to_json(const QAPair& p) {
    return json{{"question", p.question}, {"answer", p.answer}};
}

inline QAPair qa_pair_from_json(const json& j) {
    return QAPair{j.at("question").get<std::string>(), j.at("answer").get<std::string>()};
}

inline json to_json(const MCQItem& m) {
    return json{{"question", m.question}, {"choices", m.choices}, {"answer_index", m.answer_index}};
}

inline MCQItem mcq_item_from_json(const json& j) {
    MCQItem m;
    m.question = j.at("question").get<std::string>();
    m.choices = j.at("choices").get<std::vector<std::string>>();
    m.answer_index = j.at("answer_index").get<std::size_t>();
    return m;
}

inline json to_json(const CategoryEntry& e) {
    json stocks = json::array();
    for (const auto& [name, code] : e.stocks) stocks.push_back(json{{"name", name}, {"code", code}});
    return json{{"name", e.name}, {"description", e.description}, {"stocks", stocks}};
}

inline CategoryEntry category_entry_from_json(const json& j) {
    CategoryEntry e;
    e.name = j.at("name").get<std::string>();
    e.description = j.value("description", std::string{});
    for (const auto& s : j.at("stocks")) {
        e.stocks.emplace_back(s.at("name").get<std::string>(), s.at("code").get<std::string>());
    }
    return e;
}

inline json to_json(const CompanyRow& r) {
    return json{{"name", r.name}, {"code", r.code}, {"industry", r.industry}};
}

inline CompanyRow company_row_from_json(const json& j) {
    return CompanyRow{j.at("name").get<std::string>(), j.at("code").get<std::string>(),
                      j.at("industry").get<std::string>()};
}

// ---------------------------------------------------------------------------
// JSONL helpers. Lines starting with '#' and meta objects (single-key objects
// whose key starts with "finlm_") are skipped on read.

inline bool is_meta_line(const json& j) {
    return j.is_object() && j.size() == 1 && j.begin().key().rfind("finlm_", 0) == 0;
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl(std::istream& in, FromJson&& from) {
    std::vector<T> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = util::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        json j;
        try {
            j = json::parse(sv);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (is_meta_line(j)) continue;
        out.push_back(from(j));
    }
    return out;
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl_file(const std::filesystem::path& path, FromJson&& from) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_jsonl<T>(in, std::forward<FromJson>(from));
}

inline std::vector<CorpusRecord> read_records(std::istream& in) {
    return read_jsonl<CorpusRecord>(in, corpus_record_from_json);
}

inline std::vector<CorpusRecord> read_records_file(const std::filesystem::path& path) {
    return read_jsonl_file<CorpusRecord>(path, corpus_record_from_json);
}

inline void write_records(std::ostream& out, const std::vector<CorpusRecord>& records) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Manifest: one JSON object per line {id, source_kind, mime, uri, path}.

struct ManifestEntry {
    std::string id;
    SourceKind source_kind = SourceKind::other;
    Mime mime = Mime::plain;
    std::string uri;
    std::string path;
};

inline ManifestEntry manifest_entry_from_json(const json& j) {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.source_kind = source_kind_from(j.at("source_kind").get<std::string>());
    e.mime = mime_from(j.at("mime").get<std::string>());
    e.uri = j.value("uri", std::string{});
    e.path = j.at("path").get<std::string>();
    return e;
}

inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    return read_jsonl_file<ManifestEntry>(path, manifest_entry_from_json);
}

// Loads the documents a manifest points at. Relative paths resolve against
// the manifest's directory. Enforces id uniqueness and non-empty bodies.
inline std::vector<RawDocument> load_documents(const std::filesystem::path& manifest_path) {
    auto entries = load_manifest(manifest_path);
    std::vector<RawDocument> docs;
    docs.reserve(entries.size());
    std::unordered_set<std::string> seen_ids;
    for (const auto& e : entries) {
        if (e.id.empty()) throw Error(ErrorCode::InvalidDocument, "manifest entry with empty id");
        if (!seen_ids.insert(e.id).second)
            throw Error(ErrorCode::InvalidDocument, "duplicate document id: " + e.id);
        std::filesystem::path p = e.path;
        if (p.is_relative()) p = manifest_path.parent_path() / p;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "cannot open " + p.string());
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (body.empty()) throw Error(ErrorCode::InvalidDocument, "document body is empty: " + e.id);
        // downstream records are UTF-8 JSONL; repair mis-encoded inputs here
        docs.push_back(RawDocument{e.id, e.source_kind, e.mime, e.uri, util::sanitize_utf8(body), {}});
    }
    return docs;
}

// ---------------------------------------------------------------------------
// Stats

inline CorpusStats corpus_stats(const std::vector<CorpusRecord>& records) {
    CorpusStats stats;
    stats.doc_count = records.size();
    for (const auto& r : records) {
        if (!r.token_count)
            throw Error(ErrorCode::MissingTokenCounts, "record without token_count: " + r.id);
        stats.token_count += *r.token_count;
        ++stats.per_format[to_string(r.format_kind)];
    }
    return stats;
}

inline json to_json(const CorpusStats& s) {
    json per = json::object();
    for (const auto& [k, v] : s.per_format) per[k] = v;
    return json{{"doc_count", s.doc_count}, {"token_count", s.token_count}, {"per_format", per}};
}

}  // namespace finlm::corpus
