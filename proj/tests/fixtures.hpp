// Deterministic desk-scale fixture corpus: 240 records across all six
// formats, roughly 300k byte-tokenizer tokens. Pure function of the indices,
// so every run sees identical bytes.
#pragma once

#include <string>
#include <vector>

#include "finlm/corpus.hpp"
#include "finlm/markdown.hpp"
#include "finlm/render.hpp"
#include "finlm/tokenizer.hpp"
#include "finlm/util.hpp"

namespace fixtures {

namespace detail {

inline std::string sentence(std::size_t i) {
    static const char* subjects[] = {
        "The policy board",      "The regional lender",   "The trust bank",
        "The securities firm",   "The insurance group",   "The asset manager",
        "The clearing house",    "The listed manufacturer"};
    static const char* verbs[] = {"reported", "projected", "revised", "maintained",
                                  "reviewed", "expanded",  "hedged",  "disclosed"};
    static const char* objects[] = {
        "quarterly operating profit",     "its holdings of government bonds",
        "the loan-to-deposit ratio",      "foreign-exchange exposure",
        "credit costs in the retail book", "fee income from custody services",
        "capital adequacy under the new rules", "the dividend payout plan"};
    static const char* tails[] = {
        "amid stable funding conditions",       "as yields drifted higher",
        "despite softer external demand",       "after the semiannual review",
        "in line with prior guidance",          "citing firmer wage growth",
        "while spreads stayed contained",       "following the supervisory stress test"};
    std::size_t a = i % 8, b = (i / 8) % 8, c = (i / 64) % 8, d = (i / 512) % 8;
    return std::string(subjects[a]) + " " + verbs[b] + " " + objects[c] + " " + tails[d] +
           " in period " + std::to_string(100 + i % 97) + ".";
}

inline std::string paragraph(std::size_t seed, std::size_t sentences) {
    std::string out;
    for (std::size_t s = 0; s < sentences; ++s) {
        if (s) out += " ";
        out += sentence(seed * 131 + s * 17);
    }
    return out;
}

inline std::string company_name(std::size_t i) {
    static const char* first[] = {"Asahina", "Kuromori", "Tachibana", "Hayase", "Mikuni",
                                  "Sorano",  "Takeda",   "Ishigaki"};
    static const char* second[] = {"Holdings", "Industries", "Financial", "Electric",
                                   "Logistics", "Foods",      "Chemicals", "Capital"};
    return std::string(first[i % 8]) + " " + second[(i / 8) % 8];
}

inline std::string stock_code(std::size_t i) { return std::to_string(1301 + (i * 37) % 8600); }

}  // namespace detail

inline std::vector<finlm::corpus::CorpusRecord> build_fixture_corpus() {
    using namespace finlm;
    using namespace finlm::corpus;

    std::vector<CorpusRecord> records;

    // 70 markdown documents, ~6 paragraphs each
    for (std::size_t d = 0; d < 70; ++d) {
        std::string text = "# Market Review " + std::to_string(d);
        for (std::size_t p = 0; p < 6; ++p) text += "\n\n" + detail::paragraph(d * 7 + p, 8);
        CorpusRecord r;
        r.id = "md-" + std::to_string(d);
        r.format_kind = FormatKind::markdown;
        r.text = std::move(text);
        r.provenance = {r.id};
        records.push_back(std::move(r));
    }

    // 10 structured documents consolidated into 50 section records
    for (std::size_t d = 0; d < 10; ++d) {
        std::string md = detail::paragraph(9000 + d, 4);  // preamble
        for (std::size_t s = 0; s < 4; ++s) {
            md += "\n\n## Segment " + std::to_string(s) + "\n\n" + detail::paragraph(500 + d * 11 + s, 7);
        }
        auto sections =
            consolidate_sections(md, "sec-doc-" + std::to_string(d), "Filing " + std::to_string(d), {});
        records.insert(records.end(), sections.begin(), sections.end());
    }

    // 40 category records
    for (std::size_t c = 0; c < 40; ++c) {
        CategoryEntry entry;
        entry.name = "Sector " + std::to_string(c);
        entry.description = detail::paragraph(2000 + c, 3);
        for (std::size_t s = 0; s < 5; ++s)
            entry.stocks.emplace_back(detail::company_name(c * 5 + s), detail::stock_code(c * 5 + s));
        records.push_back(render_category(entry, "cat-" + std::to_string(c)));
    }

    // 10 company-list records
    static const char* industries[] = {"Banking", "Machinery", "Retail", "Utilities", "Shipping"};
    for (std::size_t l = 0; l < 10; ++l) {
        std::vector<CompanyRow> rows;
        for (std::size_t r = 0; r < 10; ++r) {
            std::size_t i = l * 10 + r;
            rows.push_back({detail::company_name(i), detail::stock_code(i), industries[i % 5]});
        }
        records.push_back(render_company_list(rows, "list-" + std::to_string(l)));
    }

    // 35 QA and 35 MCQ records
    for (std::size_t q = 0; q < 35; ++q) {
        QAPair qa{"What did the filing for period " + std::to_string(q) + " state?",
                  detail::sentence(4000 + q)};
        records.push_back(render_synthetic(qa, "qa-" + std::to_string(q), {"md-" + std::to_string(q % 70)}));

        MCQItem mcq;
        mcq.question = "Which entity " + std::string(q % 2 ? "revised" : "reported") +
                       " figures in period " + std::to_string(q) + "?";
        for (std::size_t c = 0; c < 4; ++c) mcq.choices.push_back(detail::company_name(q * 4 + c));
        mcq.answer_index = q % 4;
        records.push_back(
            render_synthetic(mcq, "mcq-" + std::to_string(q), {"md-" + std::to_string((q * 3) % 70)}));
    }

    ByteTokenizer tokenizer;
    assign_token_counts(records, tokenizer);
    return records;
}

}  // namespace fixtures
