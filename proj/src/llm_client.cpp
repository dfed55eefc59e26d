#include "rooflinekit/llm_client.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <random>
#include <thread>

#include <httplib.h>

#include "rooflinekit/errors.hpp"
#include "rooflinekit/hashing.hpp"
#include "rooflinekit/json_util.hpp"

namespace rooflinekit {

namespace {

std::string format_param(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string utc_now_iso8601() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

struct EndpointParts {
    std::string origin; // scheme://host[:port]
    std::string base_path;
};

EndpointParts split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw SchemaError("provider endpoint must include a scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    EndpointParts parts;
    if (path_start == std::string::npos) {
        parts.origin = endpoint;
    } else {
        parts.origin = endpoint.substr(0, path_start);
        parts.base_path = endpoint.substr(path_start);
        while (!parts.base_path.empty() && parts.base_path.back() == '/')
            parts.base_path.pop_back();
    }
    return parts;
}

bool is_retryable_status(int status) { return status == 429 || status >= 500; }

std::optional<double> retry_after_seconds(const httplib::Result& res) {
    if (!res || !res->has_header("Retry-After")) return std::nullopt;
    try {
        return std::stod(res->get_header_value("Retry-After"));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int backoff_ms(int attempt, int initial_ms) {
    static thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
    long base = static_cast<long>(initial_ms) << attempt;
    if (base > 30'000) base = 30'000;
    long jitter = static_cast<long>(jitter_rng() % static_cast<unsigned long>(base / 2 + 1));
    return static_cast<int>(base + jitter);
}

} // namespace

ProviderConfig ProviderConfig::from_file(const std::filesystem::path& path) {
    json doc = read_json_file(path);
    ProviderConfig config;
    try {
        config.model_id = doc.at("model_id").get<std::string>();
        if (doc.contains("endpoint")) config.endpoint = doc.at("endpoint").get<std::string>();
        if (doc.contains("api_key_env")) config.api_key_env = doc.at("api_key_env").get<std::string>();
        if (doc.contains("temperature")) config.temperature = doc.at("temperature").get<double>();
        if (doc.contains("top_p")) config.top_p = doc.at("top_p").get<double>();
        if (doc.contains("reasoning_model"))
            config.reasoning_model = doc.at("reasoning_model").get<bool>();
        if (doc.contains("max_output_tokens"))
            config.max_output_tokens = doc.at("max_output_tokens").get<int>();
        if (doc.contains("request_timeout_s"))
            config.request_timeout_s = doc.at("request_timeout_s").get<double>();
        if (doc.contains("max_retries")) config.max_retries = doc.at("max_retries").get<int>();
        if (doc.contains("retry_initial_delay_ms"))
            config.retry_initial_delay_ms = doc.at("retry_initial_delay_ms").get<int>();
        if (doc.contains("concurrency_limit"))
            config.concurrency_limit = doc.at("concurrency_limit").get<int>();
        if (doc.contains("requests_per_minute"))
            config.requests_per_minute = doc.at("requests_per_minute").get<int>();
        if (doc.contains("price_per_1m_input"))
            config.price_per_1m_input = doc.at("price_per_1m_input").get<double>();
        if (doc.contains("price_per_1m_output"))
            config.price_per_1m_output = doc.at("price_per_1m_output").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError("bad provider config " + path.string() + ": " + e.what());
    }
    config.validate();
    return config;
}

void ProviderConfig::validate() const {
    if (model_id.empty()) throw SchemaError("provider config: model_id is required");
    if (temperature < 0.0 || temperature > 2.0)
        throw SchemaError("provider config: temperature must be in [0, 2]");
    if (!(top_p > 0.0 && top_p <= 1.0))
        throw SchemaError("provider config: top_p must be in (0, 1]");
    if (concurrency_limit < 1)
        throw SchemaError("provider config: concurrency_limit must be >= 1");
    if (max_retries < 0) throw SchemaError("provider config: max_retries must be >= 0");
    split_endpoint(endpoint);
}

std::string ProviderConfig::api_key() const {
    const char* value = std::getenv(api_key_env.c_str());
    return value ? value : "";
}

std::string query_record_to_json_line(const QueryRecord& record) {
    json doc{{"request_hash", record.request_hash},
             {"bundle_id", record.bundle_id},
             {"model_id", record.model_id},
             {"mode", record.mode},
             {"temperature", record.temperature},
             {"top_p", record.top_p},
             {"raw_text", record.raw_text},
             {"usage",
              {{"prompt_tokens", record.usage.prompt_tokens},
               {"completion_tokens", record.usage.completion_tokens}}},
             {"latency_ms", record.latency_ms},
             {"timestamp", record.timestamp},
             {"error", record.error}};
    return doc.dump();
}

QueryRecord query_record_from_json_line(const std::string& line) {
    QueryRecord record;
    json doc = json::parse(line); // caller wraps parse errors
    record.request_hash = doc.at("request_hash").get<std::string>();
    record.bundle_id = doc.at("bundle_id").get<std::string>();
    record.model_id = doc.at("model_id").get<std::string>();
    record.mode = doc.at("mode").get<std::string>();
    record.temperature = doc.at("temperature").get<double>();
    record.top_p = doc.at("top_p").get<double>();
    record.raw_text = doc.at("raw_text").get<std::string>();
    record.usage.prompt_tokens = doc.at("usage").at("prompt_tokens").get<long>();
    record.usage.completion_tokens = doc.at("usage").at("completion_tokens").get<long>();
    record.latency_ms = doc.at("latency_ms").get<double>();
    record.timestamp = doc.at("timestamp").get<std::string>();
    record.error = doc.at("error").get<std::string>();
    return record;
}

std::string request_hash(const ProviderConfig& config, const PromptBundle& bundle) {
    std::string material;
    material += config.model_id;
    material += '\x1f';
    material += bundle.system_text;
    material += '\x1f';
    material += bundle.user_text;
    material += '\x1f';
    material += format_param(config.temperature);
    material += '\x1f';
    material += format_param(config.top_p);
    return sha256_hex(material);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::entry_path(const std::string& hash) const {
    return dir_ / hash.substr(0, 2) / (hash + ".json");
}

std::optional<QueryRecord> ResponseCache::lookup(const std::string& hash) const {
    std::filesystem::path path = entry_path(hash);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        return query_record_from_json_line(read_text_file(path));
    } catch (const std::exception& e) {
        std::cerr << "warning: corrupt cache entry " << path.string() << " (" << e.what()
                  << "), treating as miss\n";
        return std::nullopt;
    }
}

void ResponseCache::store(const QueryRecord& record) {
    write_text_file(entry_path(record.request_hash), query_record_to_json_line(record) + "\n");
}

ChatClient::ChatClient(ProviderConfig config, std::filesystem::path cache_dir, bool replay)
    : config_(std::move(config)), cache_(std::move(cache_dir)), replay_(replay) {
    config_.validate();
}

void ChatClient::rate_limit_acquire() {
    if (config_.requests_per_minute <= 0) return;
    auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(60.0 / config_.requests_per_minute));
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard<std::mutex> lock(rate_mutex_);
        auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_request_slot_);
        next_request_slot_ = slot + interval;
    }
    std::this_thread::sleep_until(slot);
}

QueryRecord ChatClient::send_over_http(const PromptBundle& bundle, const std::string& hash) {
    QueryRecord record;
    record.request_hash = hash;
    record.bundle_id = bundle.target_sample_id;
    record.model_id = config_.model_id;
    record.mode = to_string(bundle.mode);
    record.temperature = config_.temperature;
    record.top_p = config_.top_p;
    record.timestamp = utc_now_iso8601();

    json body{{"model", config_.model_id}};
    json messages = json::array();
    if (!bundle.system_text.empty())
        messages.push_back(json{{"role", "system"}, {"content", bundle.system_text}});
    messages.push_back(json{{"role", "user"}, {"content", bundle.user_text}});
    body["messages"] = messages;
    if (!config_.reasoning_model) {
        body["temperature"] = config_.temperature;
        body["top_p"] = config_.top_p;
        if (config_.max_output_tokens > 0) body["max_tokens"] = config_.max_output_tokens;
    } else if (config_.max_output_tokens > 0) {
        body["max_completion_tokens"] = config_.max_output_tokens;
    }
    std::string payload = body.dump();

    EndpointParts endpoint = split_endpoint(config_.endpoint);
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::duration<double>(config_.request_timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.request_timeout_s));
    std::string key = config_.api_key();
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
    std::string path = endpoint.base_path + "/chat/completions";

    auto start = std::chrono::steady_clock::now();
    std::string last_error;

    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(backoff_ms(attempt - 1, config_.retry_initial_delay_ms)));
        }
        rate_limit_acquire();
        network_calls_.fetch_add(1);
        httplib::Result res = client.Post(path, headers, payload, "application/json");

        if (!res) {
            last_error = "transport: " + httplib::to_string(res.error());
            continue; // connection-level failures are transient
        }
        if (res->status == 200) {
            record.latency_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            try {
                json reply = json::parse(res->body);
                record.raw_text =
                    reply.at("choices").at(0).at("message").at("content").get<std::string>();
                if (reply.contains("usage")) {
                    record.usage.prompt_tokens =
                        reply["usage"].value("prompt_tokens", 0L);
                    record.usage.completion_tokens =
                        reply["usage"].value("completion_tokens", 0L);
                }
            } catch (const json::exception& e) {
                record.error = std::string("bad-response: ") + e.what();
            }
            return record;
        }
        if (is_retryable_status(res->status)) {
            last_error = "http-" + std::to_string(res->status);
            if (auto delay = retry_after_seconds(res)) {
                std::this_thread::sleep_for(std::chrono::duration<double>(*delay));
            }
            continue;
        }
        // Other 4xx: permanent, no retry.
        record.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        record.error = "permanent: http-" + std::to_string(res->status);
        return record;
    }

    record.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    record.error = "retries-exhausted: " + last_error;
    return record;
}

QueryRecord ChatClient::send(const PromptBundle& bundle) {
    std::string hash = request_hash(config_, bundle);

    if (auto cached = cache_.lookup(hash)) {
        cached->from_cache = true;
        return *cached;
    }
    if (replay_) {
        QueryRecord record;
        record.request_hash = hash;
        record.bundle_id = bundle.target_sample_id;
        record.model_id = config_.model_id;
        record.mode = to_string(bundle.mode);
        record.temperature = config_.temperature;
        record.top_p = config_.top_p;
        record.error = "replay-miss: no cached response for " + hash;
        return record;
    }

    QueryRecord record = send_over_http(bundle, hash);
    if (record.ok()) cache_.store(record);
    return record;
}

std::vector<QueryRecord> ChatClient::send_batch(const std::vector<PromptBundle>& bundles) {
    if (bundles.empty()) throw std::domain_error("send_batch: empty bundle list");

    std::vector<QueryRecord> records(bundles.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= bundles.size()) return;
            try {
                records[i] = send(bundles[i]);
            } catch (const std::exception& e) {
                QueryRecord failed;
                failed.bundle_id = bundles[i].target_sample_id;
                failed.model_id = config_.model_id;
                failed.mode = to_string(bundles[i].mode);
                failed.error = std::string("internal: ") + e.what();
                records[i] = std::move(failed);
            }
        }
    };

    std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(config_.concurrency_limit), bundles.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return records;
}

} // namespace rooflinekit
