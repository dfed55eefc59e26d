#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace rooflinekit {

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::size_t count(std::string_view text) const = 0;
    virtual std::string id() const = 0;
    // True when counts are an estimate rather than an exact vocabulary count.
    virtual bool approximate() const = 0;
};

// ceil(len/4) estimator. Used directly (id "approx-chars4") and as the
// fallback when a requested tokenizer is unavailable.
class CharEstimateTokenizer : public Tokenizer {
public:
    std::size_t count(std::string_view text) const override { return (text.size() + 3) / 4; }
    std::string id() const override { return "approx-chars4"; }
    bool approximate() const override { return true; }
};

using TokenizerFactory = std::function<std::unique_ptr<Tokenizer>()>;

// Register an exact tokenizer under an id (e.g. a vocabulary-backed one
// supplied by an embedding application).
void register_tokenizer(const std::string& id, TokenizerFactory factory);

struct TokenizerHandle {
    std::unique_ptr<Tokenizer> tokenizer;
    std::string requested_id;
    bool fell_back = false; // requested id unavailable, estimator substituted
};

// Resolve an id from the registry. Unknown ids fall back to the character
// estimator with fell_back set so callers can surface a warning.
TokenizerHandle make_tokenizer(const std::string& id);

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer);

} // namespace rooflinekit
