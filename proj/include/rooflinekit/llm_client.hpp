#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rooflinekit/prompts.hpp"

namespace rooflinekit {

struct ProviderConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model_id;
    std::string api_key_env = "LLM_API_KEY"; // name of the env var holding the key
    double temperature = 0.1;
    double top_p = 0.2;
    bool reasoning_model = false; // suppresses sampling params in requests
    int max_output_tokens = 0;    // 0 = provider default
    double request_timeout_s = 120.0;
    int max_retries = 3;
    int retry_initial_delay_ms = 500;
    int concurrency_limit = 4;
    int requests_per_minute = 0; // 0 = unlimited
    // Optional price metadata, echoed into reports; never validated.
    std::optional<double> price_per_1m_input;
    std::optional<double> price_per_1m_output;

    static ProviderConfig from_file(const std::filesystem::path& path);
    void validate() const;
    std::string api_key() const; // resolved from the environment, may be empty
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

// One query/response pair. error holds a category:detail string when the
// query failed; raw_text is empty in that case.
struct QueryRecord {
    std::string request_hash;
    std::string bundle_id;
    std::string model_id;
    std::string mode;
    double temperature = 0.0;
    double top_p = 0.0;
    std::string raw_text;
    TokenUsage usage;
    double latency_ms = 0.0;
    std::string timestamp;
    std::string error;
    bool from_cache = false; // runtime-only, not serialized

    bool ok() const { return error.empty(); }
};

std::string query_record_to_json_line(const QueryRecord& record);
QueryRecord query_record_from_json_line(const std::string& line);

// Stable content address over the exact request inputs: model id, the full
// prompt text, and both sampling parameters.
std::string request_hash(const ProviderConfig& config, const PromptBundle& bundle);

// Content-addressed response store: <dir>/<hash[0:2]>/<hash>.json, written
// atomically (temp file + rename) so concurrent writers leave one winner.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    // Corrupt entries count as a miss (a warning goes to stderr).
    std::optional<QueryRecord> lookup(const std::string& hash) const;
    void store(const QueryRecord& record);
    std::filesystem::path entry_path(const std::string& hash) const;

private:
    std::filesystem::path dir_;
};

// Chat-completion client with caching, bounded-concurrency batching, retry
// with backoff, and a replay mode that serves everything from the cache.
class ChatClient {
public:
    ChatClient(ProviderConfig config, std::filesystem::path cache_dir, bool replay = false);

    QueryRecord send(const PromptBundle& bundle);

    // Results come back in input order; per-item failures become error
    // records, never exceptions.
    std::vector<QueryRecord> send_batch(const std::vector<PromptBundle>& bundles);

    long network_calls() const { return network_calls_.load(); }
    const ProviderConfig& config() const { return config_; }

private:
    QueryRecord send_over_http(const PromptBundle& bundle, const std::string& hash);
    void rate_limit_acquire();

    ProviderConfig config_;
    ResponseCache cache_;
    bool replay_ = false;
    std::atomic<long> network_calls_{0};
    std::mutex rate_mutex_;
    std::chrono::steady_clock::time_point next_request_slot_{};
};

} // namespace rooflinekit
