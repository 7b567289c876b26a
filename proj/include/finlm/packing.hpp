#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finlm/corpus.hpp"
#include "finlm/errors.hpp"
#include "finlm/tokenizer.hpp"

namespace finlm::train {

struct PackedSequence {
    std::vector<TokenId> token_ids;
    std::vector<std::size_t> segment_boundaries;  // offsets where a document starts
    std::size_t pad_count = 0;

    std::size_t non_pad_length() const { return token_ids.size() - pad_count; }

    bool operator==(const PackedSequence&) const = default;
};

struct PackPolicy {
    bool pad_to_max = false;
    TokenId pad_id = ByteTokenizer::kEot;
};

// Greedy first-fit packing in input order. Documents longer than max_len are
// split at max_len boundaries. No separator tokens are inserted, so the total
// non-pad token count is conserved.
inline std::vector<PackedSequence> pack_sequences(const std::vector<std::vector<TokenId>>& documents,
                                                  std::size_t max_len, const PackPolicy& policy = {}) {
    if (max_len < 1) throw Error(ErrorCode::DomainError, "max_len must be >= 1");
    std::vector<PackedSequence> packed;
    PackedSequence current;

    auto flush = [&] {
        if (current.token_ids.empty()) return;
        if (policy.pad_to_max && current.token_ids.size() < max_len) {
            current.pad_count = max_len - current.token_ids.size();
            current.token_ids.resize(max_len, policy.pad_id);
        }
        packed.push_back(std::move(current));
        current = PackedSequence{};
    };

    for (const auto& doc : documents) {
        std::size_t offset = 0;
        while (offset < doc.size()) {
            if (current.token_ids.size() == max_len) flush();
            std::size_t room = max_len - current.token_ids.size();
            std::size_t remaining = doc.size() - offset;
            std::size_t take = std::min(room, remaining);
            current.segment_boundaries.push_back(current.token_ids.size());
            current.token_ids.insert(current.token_ids.end(), doc.begin() + static_cast<std::ptrdiff_t>(offset),
                                     doc.begin() + static_cast<std::ptrdiff_t>(offset + take));
            offset += take;
            if (current.token_ids.size() == max_len && offset < doc.size()) flush();
        }
    }
    flush();
    return packed;
}

inline std::vector<PackedSequence> pack_records(const std::vector<corpus::CorpusRecord>& records,
                                                const Tokenizer& tokenizer, std::size_t max_len,
                                                const PackPolicy& policy = {}) {
    std::vector<std::vector<TokenId>> docs;
    docs.reserve(records.size());
    for (const auto& r : records) docs.push_back(tokenizer.encode(r.text));
    return pack_sequences(docs, max_len, policy);
}

// ---------------------------------------------------------------------------
// Packed-data file: JSONL with a versioned header line.

inline constexpr int kPackedFileVersion = 1;

inline void write_packed_file(std::ostream& out, const std::vector<PackedSequence>& sequences,
                              std::size_t max_len, const std::string& tokenizer_name) {
    nlohmann::json header{{"finlm_packed",
                           {{"version", kPackedFileVersion},
                            {"max_seq_len", max_len},
                            {"tokenizer", tokenizer_name}}}};
    out << header.dump() << '\n';
    for (const auto& s : sequences) {
        nlohmann::json j{{"token_ids", s.token_ids},
                         {"segment_boundaries", s.segment_boundaries},
                         {"pad_count", s.pad_count}};
        out << j.dump() << '\n';
    }
}

struct PackedFile {
    std::size_t max_seq_len = 0;
    std::string tokenizer_name;
    std::vector<PackedSequence> sequences;
};

inline PackedFile read_packed_file(std::istream& in) {
    PackedFile file;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = util::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(sv);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (j.contains("finlm_packed")) {
            const auto& h = j.at("finlm_packed");
            int version = h.at("version").get<int>();
            if (version != kPackedFileVersion)
                throw Error(ErrorCode::ParseError,
                            "unsupported packed file version " + std::to_string(version));
            file.max_seq_len = h.at("max_seq_len").get<std::size_t>();
            file.tokenizer_name = h.value("tokenizer", std::string{});
            header_seen = true;
            continue;
        }
        if (corpus::is_meta_line(j)) continue;
        PackedSequence s;
        s.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
        s.segment_boundaries = j.at("segment_boundaries").get<std::vector<std::size_t>>();
        s.pad_count = j.at("pad_count").get<std::size_t>();
        file.sequences.push_back(std::move(s));
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, "packed file missing header line");
    return file;
}

inline PackedFile read_packed_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_packed_file(in);
}

}  // namespace finlm::train
