#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "finlm/corpus.hpp"
#include "finlm/util.hpp"

namespace finlm::corpus {

struct DedupeConfig {
    bool near_duplicates = false;
    double jaccard_threshold = 0.9;
    std::size_t shingle_size = 8;  // code points per shingle
};

namespace detail {

// Shingles are hashed character n-grams over lowercased text with all
// whitespace removed.
inline std::unordered_set<std::uint64_t> shingle_set(const std::string& text, std::size_t n) {
    std::string norm = util::lower_ascii(util::normalize_compat(text));
    std::vector<char32_t> cps;
    cps.reserve(norm.size());
    std::size_t i = 0;
    while (i < norm.size()) {
        char32_t cp = util::utf8_next(norm, i);
        if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') continue;
        cps.push_back(cp);
    }
    std::unordered_set<std::uint64_t> shingles;
    if (cps.size() < n) {
        if (!cps.empty()) {
            std::string_view bytes(reinterpret_cast<const char*>(cps.data()), cps.size() * sizeof(char32_t));
            shingles.insert(util::fnv1a64(bytes));
        }
        return shingles;
    }
    for (std::size_t start = 0; start + n <= cps.size(); ++start) {
        std::string_view bytes(reinterpret_cast<const char*>(cps.data() + start), n * sizeof(char32_t));
        shingles.insert(util::fnv1a64(bytes));
    }
    return shingles;
}

inline double jaccard(const std::unordered_set<std::uint64_t>& a,
                      const std::unordered_set<std::uint64_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const auto& smaller = a.size() <= b.size() ? a : b;
    const auto& larger = a.size() <= b.size() ? b : a;
    std::size_t inter = 0;
    for (auto h : smaller)
        if (larger.count(h)) ++inter;
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace detail

// Removes exact-duplicate texts (first occurrence wins) and, when enabled,
// near-duplicates by shingle Jaccard overlap against every kept record.
// Input order is preserved; idempotent.
inline std::vector<CorpusRecord> dedupe(const std::vector<CorpusRecord>& records,
                                        const DedupeConfig& config = {}) {
    std::vector<CorpusRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::uint64_t> exact_hashes;
    std::vector<std::unordered_set<std::uint64_t>> kept_shingles;

    for (const auto& record : records) {
        if (!exact_hashes.insert(util::fnv1a64(record.text)).second) continue;
        if (config.near_duplicates) {
            auto shingles = detail::shingle_set(record.text, config.shingle_size);
            bool near_dup = false;
            for (const auto& prior : kept_shingles) {
                if (detail::jaccard(shingles, prior) >= config.jaccard_threshold) {
                    near_dup = true;
                    break;
                }
            }
            if (near_dup) continue;
            kept_shingles.push_back(std::move(shingles));
        }
        kept.push_back(record);
    }
    return kept;
}

}  // namespace finlm::corpus
