#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rooflinekit/llm_client.hpp"
#include "test_support.hpp"

using namespace rooflinekit;
using testsupport::TempDir;
using nlohmann::json;

namespace {

PromptBundle simple_bundle(const std::string& id, const std::string& user = "classify this") {
    PromptBundle bundle;
    bundle.system_text = "system text";
    bundle.user_text = user;
    bundle.mode = PromptMode::zero_shot;
    bundle.target_sample_id = id;
    return bundle;
}

QueryRecord stub_record(const std::string& hash, const std::string& text) {
    QueryRecord record;
    record.request_hash = hash;
    record.bundle_id = "b1";
    record.model_id = "mock-model";
    record.mode = "zero_shot";
    record.temperature = 0.1;
    record.top_p = 0.2;
    record.raw_text = text;
    record.usage.prompt_tokens = 12;
    record.usage.completion_tokens = 1;
    record.latency_ms = 3.5;
    record.timestamp = "2025-01-01T00:00:00Z";
    return record;
}

ProviderConfig mock_config() {
    ProviderConfig config;
    config.model_id = "mock-model";
    config.endpoint = "http://127.0.0.1:9/v1"; // never reachable
    config.max_retries = 0;
    config.retry_initial_delay_ms = 1;
    config.request_timeout_s = 2.0;
    return config;
}

// Local chat-completion stand-in with scriptable behavior per kernel name.
class MockServer {
public:
    explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/chat/completions",
                     [this, handler](const httplib::Request& req, httplib::Response& res) {
                         ++hits_;
                         handler(req, res);
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer() {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    int hits() const { return hits_.load(); }

    static void reply_text(httplib::Response& res, const std::string& text) {
        json body{{"choices", json::array({json{{"message", json{{"content", text}}}}})},
                  {"usage", json{{"prompt_tokens", 5}, {"completion_tokens", 1}}}};
        res.set_content(body.dump(), "application/json");
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::atomic<int> hits_{0};
    std::thread thread_;
};

} // namespace

TEST_CASE("request hashes are stable and parameter-sensitive") {
    ProviderConfig config = mock_config();
    PromptBundle bundle = simple_bundle("b1");

    std::string h1 = request_hash(config, bundle);
    CHECK(h1 == request_hash(config, bundle));
    CHECK(h1.size() == 64);

    ProviderConfig other_top_p = config;
    other_top_p.top_p = 0.9;
    CHECK(request_hash(other_top_p, bundle) != h1);

    ProviderConfig other_model = config;
    other_model.model_id = "another-model";
    CHECK(request_hash(other_model, bundle) != h1);

    PromptBundle other_prompt = simple_bundle("b1", "different user text");
    CHECK(request_hash(config, other_prompt) != h1);
}

TEST_CASE("response cache stores and looks up records verbatim") {
    TempDir dir("cache");
    ResponseCache cache(dir.path);
    QueryRecord record = stub_record(std::string(64, 'a'), "Bandwidth");

    CHECK(!cache.lookup(record.request_hash).has_value());
    cache.store(record);
    auto loaded = cache.lookup(record.request_hash);
    REQUIRE(loaded.has_value());
    CHECK(loaded->raw_text == "Bandwidth");
    CHECK(loaded->usage.prompt_tokens == 12);
    CHECK(loaded->latency_ms == 3.5);
    CHECK(loaded->timestamp == record.timestamp);

    SUBCASE("entries shard by hash prefix") {
        CHECK(cache.entry_path(record.request_hash).parent_path().filename() == "aa");
    }
    SUBCASE("corrupt entries fall back to a miss") {
        testsupport::write_file(cache.entry_path(record.request_hash), "{broken json");
        CHECK(!cache.lookup(record.request_hash).has_value());
    }
    SUBCASE("concurrent stores of the same hash leave one readable winner") {
        QueryRecord a = stub_record(std::string(64, 'b'), "Compute");
        QueryRecord b = stub_record(std::string(64, 'b'), "Bandwidth");
        std::thread t1([&] { for (int i = 0; i < 50; ++i) cache.store(a); });
        std::thread t2([&] { for (int i = 0; i < 50; ++i) cache.store(b); });
        t1.join();
        t2.join();
        auto survivor = cache.lookup(std::string(64, 'b'));
        REQUIRE(survivor.has_value());
        CHECK((survivor->raw_text == "Compute" || survivor->raw_text == "Bandwidth"));
    }
}

TEST_CASE("query records round-trip through jsonl") {
    QueryRecord record = stub_record(std::string(64, 'c'), "Compute");
    record.error = "";
    QueryRecord loaded = query_record_from_json_line(query_record_to_json_line(record));
    CHECK(loaded.request_hash == record.request_hash);
    CHECK(loaded.raw_text == record.raw_text);
    CHECK(loaded.usage.completion_tokens == record.usage.completion_tokens);
    CHECK(loaded.ok());
}

TEST_CASE("replay mode never dials out") {
    TempDir dir("replay");
    ProviderConfig config = mock_config();
    PromptBundle bundle = simple_bundle("b1");

    SUBCASE("miss produces a replay-miss error record") {
        ChatClient client(config, dir.path, /*replay=*/true);
        QueryRecord record = client.send(bundle);
        CHECK(!record.ok());
        CHECK(record.error.find("replay-miss") != std::string::npos);
        CHECK(client.network_calls() == 0);
    }
    SUBCASE("hit returns the stored record without network") {
        ResponseCache cache(dir.path);
        QueryRecord canned = stub_record(request_hash(config, bundle), "Bandwidth");
        canned.bundle_id = bundle.target_sample_id;
        cache.store(canned);

        ChatClient client(config, dir.path, /*replay=*/true);
        QueryRecord record = client.send(bundle);
        CHECK(record.ok());
        CHECK(record.raw_text == "Bandwidth");
        CHECK(record.from_cache);
        CHECK(record.timestamp == canned.timestamp);
        CHECK(client.network_calls() == 0);
    }
}

TEST_CASE("live sends hit the endpoint, cache, and honor sampling flags") {
    TempDir dir("live");

    SUBCASE("successful call parses content and populates the cache") {
        std::atomic<bool> saw_sampling{false};
        MockServer server([&](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            saw_sampling = body.contains("temperature") && body.contains("top_p");
            CHECK(body.at("model") == "mock-model");
            CHECK(body.at("messages").size() == 2);
            MockServer::reply_text(res, "Compute");
        });
        ProviderConfig config = mock_config();
        config.endpoint = server.endpoint();

        ChatClient client(config, dir.path, false);
        QueryRecord record = client.send(simple_bundle("b1"));
        REQUIRE(record.ok());
        CHECK(record.raw_text == "Compute");
        CHECK(record.usage.prompt_tokens == 5);
        CHECK(saw_sampling.load());
        CHECK(client.network_calls() == 1);

        // Second send is a pure cache hit.
        QueryRecord cached = client.send(simple_bundle("b1"));
        CHECK(cached.ok());
        CHECK(cached.from_cache);
        CHECK(client.network_calls() == 1);
        CHECK(server.hits() == 1);
    }
    SUBCASE("reasoning models omit sampling parameters") {
        std::atomic<bool> clean{false};
        MockServer server([&](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            clean = !body.contains("temperature") && !body.contains("top_p") &&
                    !body.contains("max_tokens");
            MockServer::reply_text(res, "Bandwidth");
        });
        ProviderConfig config = mock_config();
        config.endpoint = server.endpoint();
        config.reasoning_model = true;
        config.max_output_tokens = 0;

        ChatClient client(config, dir.path, false);
        QueryRecord record = client.send(simple_bundle("b2"));
        REQUIRE(record.ok());
        CHECK(clean.load());
    }
    SUBCASE("transient 500s are retried until success") {
        std::atomic<int> calls{0};
        MockServer server([&](const httplib::Request&, httplib::Response& res) {
            if (++calls <= 2) {
                res.status = 500;
                res.set_content("boom", "text/plain");
                return;
            }
            MockServer::reply_text(res, "Compute");
        });
        ProviderConfig config = mock_config();
        config.endpoint = server.endpoint();
        config.max_retries = 3;
        config.retry_initial_delay_ms = 1;

        ChatClient client(config, dir.path, false);
        QueryRecord record = client.send(simple_bundle("b3"));
        REQUIRE(record.ok());
        CHECK(calls.load() == 3);
    }
    SUBCASE("rate-limit status honors Retry-After") {
        std::atomic<int> calls{0};
        MockServer server([&](const httplib::Request&, httplib::Response& res) {
            if (++calls == 1) {
                res.status = 429;
                res.set_header("Retry-After", "0.05");
                res.set_content("slow down", "text/plain");
                return;
            }
            MockServer::reply_text(res, "Compute");
        });
        ProviderConfig config = mock_config();
        config.endpoint = server.endpoint();
        config.max_retries = 2;
        config.retry_initial_delay_ms = 1;

        ChatClient client(config, dir.path, false);
        auto start = std::chrono::steady_clock::now();
        QueryRecord record = client.send(simple_bundle("b4"));
        auto elapsed = std::chrono::steady_clock::now() - start;
        REQUIRE(record.ok());
        CHECK(calls.load() == 2);
        CHECK(std::chrono::duration<double>(elapsed).count() >= 0.05);
    }
    SUBCASE("other 4xx statuses are permanent errors with no retry") {
        std::atomic<int> calls{0};
        MockServer server([&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.status = 400;
            res.set_content("bad request", "text/plain");
        });
        ProviderConfig config = mock_config();
        config.endpoint = server.endpoint();
        config.max_retries = 3;

        ChatClient client(config, dir.path, false);
        QueryRecord record = client.send(simple_bundle("b5"));
        CHECK(!record.ok());
        CHECK(record.error.find("http-400") != std::string::npos);
        CHECK(calls.load() == 1);
        // Failures are not cached.
        CHECK(!ResponseCache(dir.path).lookup(record.request_hash).has_value());
    }
    SUBCASE("exhausted retries produce a transport error record") {
        ProviderConfig config = mock_config(); // unreachable endpoint
        config.max_retries = 1;
        config.retry_initial_delay_ms = 1;
        config.request_timeout_s = 0.2;

        ChatClient client(config, dir.path, false);
        QueryRecord record = client.send(simple_bundle("b6"));
        CHECK(!record.ok());
        CHECK(record.error.find("retries-exhausted") != std::string::npos);
    }
    SUBCASE("the api key is sent but never lands in cache files") {
        setenv("LLM_API_KEY", "sk-test-secret-123", 1);
        std::atomic<bool> authed{false};
        MockServer server([&](const httplib::Request& req, httplib::Response& res) {
            authed = req.get_header_value("Authorization") == "Bearer sk-test-secret-123";
            MockServer::reply_text(res, "Compute");
        });
        ProviderConfig config = mock_config();
        config.endpoint = server.endpoint();

        ChatClient client(config, dir.path, false);
        QueryRecord record = client.send(simple_bundle("b7"));
        REQUIRE(record.ok());
        CHECK(authed.load());

        std::string entry = testsupport::slurp(ResponseCache(dir.path).entry_path(record.request_hash));
        CHECK(entry.find("sk-test-secret-123") == std::string::npos);
        unsetenv("LLM_API_KEY");
    }
}

TEST_CASE("batch sends preserve input order under concurrency") {
    TempDir dir("batch");
    MockServer server([](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body);
        std::string user = body["messages"][1]["content"].get<std::string>();
        // Finish later items faster to scramble completion order.
        if (user.find("item-0") != std::string::npos)
            std::this_thread::sleep_for(std::chrono::milliseconds(40));
        MockServer::reply_text(res, "echo " + user);
    });
    ProviderConfig config = mock_config();
    config.endpoint = server.endpoint();
    config.concurrency_limit = 4;

    std::vector<PromptBundle> bundles;
    for (int i = 0; i < 8; ++i)
        bundles.push_back(simple_bundle("id-" + std::to_string(i), "item-" + std::to_string(i)));

    ChatClient client(config, dir.path, false);
    auto records = client.send_batch(bundles);
    REQUIRE(records.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(records[i].bundle_id == "id-" + std::to_string(i));
        CHECK(records[i].raw_text == "echo item-" + std::to_string(i));
    }

    SUBCASE("a permanent failure does not abort the batch") {
        TempDir dir2("batch2");
        MockServer flaky([](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            std::string user = body["messages"][1]["content"].get<std::string>();
            if (user.find("item-3") != std::string::npos) {
                res.status = 404;
                res.set_content("nope", "text/plain");
                return;
            }
            MockServer::reply_text(res, "ok");
        });
        ProviderConfig cfg = mock_config();
        cfg.endpoint = flaky.endpoint();
        ChatClient c2(cfg, dir2.path, false);
        auto out = c2.send_batch(bundles);
        REQUIRE(out.size() == 8);
        int failures = 0;
        for (const auto& record : out)
            if (!record.ok()) ++failures;
        CHECK(failures == 1);
        CHECK(!out[3].ok());
    }
    SUBCASE("a fully warmed cache completes with zero network calls") {
        ChatClient warm(config, dir.path, true);
        auto replayed = warm.send_batch(bundles);
        REQUIRE(replayed.size() == 8);
        for (const auto& record : replayed) CHECK(record.ok());
        CHECK(warm.network_calls() == 0);
        CHECK(server.hits() == 8);
    }
}
