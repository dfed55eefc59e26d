#include "rooflinekit/tokenizer.hpp"

#include <map>
#include <mutex>

namespace rooflinekit {

namespace {

std::mutex g_registry_mutex;

std::map<std::string, TokenizerFactory>& registry() {
    static std::map<std::string, TokenizerFactory> reg = {
        {"approx-chars4", [] { return std::make_unique<CharEstimateTokenizer>(); }},
    };
    return reg;
}

} // namespace

void register_tokenizer(const std::string& id, TokenizerFactory factory) {
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    registry()[id] = std::move(factory);
}

TokenizerHandle make_tokenizer(const std::string& id) {
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    TokenizerHandle handle;
    handle.requested_id = id;
    auto it = registry().find(id);
    if (it != registry().end()) {
        handle.tokenizer = it->second();
        return handle;
    }
    handle.tokenizer = std::make_unique<CharEstimateTokenizer>();
    handle.fell_back = true;
    return handle;
}

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer) {
    return tokenizer.count(text);
}

} // namespace rooflinekit
