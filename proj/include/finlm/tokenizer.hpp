#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "finlm/errors.hpp"

namespace finlm {

using TokenId = std::int32_t;

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::vector<TokenId> encode(std::string_view text) const = 0;
    virtual std::string decode(const std::vector<TokenId>& ids) const = 0;
    // Number of ids the model vocabulary must cover (includes reserved ids).
    virtual TokenId vocab_size() const = 0;
    virtual std::string name() const = 0;
};

// Byte-level tokenizer: one token per byte, ids 0..255. Id 256 is reserved as
// end-of-text and never produced by encode; decode skips reserved ids, so
// decode(encode(x)) == x for any string.
class ByteTokenizer final : public Tokenizer {
public:
    static constexpr TokenId kEot = 256;

    std::vector<TokenId> encode(std::string_view text) const override {
        std::vector<TokenId> ids;
        ids.reserve(text.size());
        for (unsigned char c : text) ids.push_back(static_cast<TokenId>(c));
        return ids;
    }

    std::string decode(const std::vector<TokenId>& ids) const override {
        std::string out;
        out.reserve(ids.size());
        for (TokenId id : ids) {
            if (id >= 0 && id < 256) out.push_back(static_cast<char>(id));
        }
        return out;
    }

    TokenId vocab_size() const override { return 257; }
    std::string name() const override { return "byte"; }
};

inline std::unique_ptr<Tokenizer> make_tokenizer(const std::string& name) {
    if (name == "byte" || name.empty()) return std::make_unique<ByteTokenizer>();
    throw Error(ErrorCode::UsageError, "unknown tokenizer: " + name);
}

}  // namespace finlm
