#include <doctest.h>

#include "reqcheck/common/errors.hpp"
#include "reqcheck/llm/gateway.hpp"
#include "reqcheck/llm/openai_provider.hpp"
#include "reqcheck/llm/replay_cache.hpp"
#include "reqcheck/llm/scripted_provider.hpp"

#include "support/fixtures.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <fstream>
#include <future>
#include <thread>

using namespace reqcheck;
using namespace reqcheck::llm;

namespace {

ChatRequest simple_request(const std::string& content, const std::string& tag = "test") {
    ChatRequest request;
    request.model_name = "stub-model";
    request.messages.push_back({Role::User, content});
    request.request_tag = tag;
    return request;
}

// Minimal OpenAI-compatible stub server with scriptable failure behavior.
class StubServer {
public:
    explicit StubServer(int fail_first_n = 0, int sleep_ms = 0, int fail_status = 429)
        : fails_remaining_(fail_first_n), sleep_ms_(sleep_ms), fail_status_(fail_status) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         ++total_requests_;
                         int current = ++in_flight_;
                         max_in_flight_ = std::max(max_in_flight_.load(), current);
                         if (sleep_ms_ > 0) {
                             std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms_));
                         }
                         if (fails_remaining_.fetch_sub(1) > 0) {
                             res.status = fail_status_;
                             res.set_content("{\"error\":\"scripted failure\"}",
                                             "application/json");
                         } else {
                             auto body = nlohmann::json::parse(req.body);
                             nlohmann::json reply = {
                                 {"choices",
                                  {{{"message",
                                     {{"role", "assistant"}, {"content", "stub says hi"}}}}}},
                                 {"usage",
                                  {{"prompt_tokens", 10}, {"completion_tokens", 5}}},
                             };
                             res.set_content(reply.dump(), "application/json");
                         }
                         --in_flight_;
                     });
        server_.Post("/v1/embeddings", [](const httplib::Request& req,
                                          httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body);
            nlohmann::json data = nlohmann::json::array();
            for (std::size_t i = 0; i < body["input"].size(); ++i) {
                data.push_back({{"index", i}, {"embedding", {1.0, 2.0, 2.0}}});
            }
            res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int total_requests() const { return total_requests_.load(); }
    int max_in_flight() const { return max_in_flight_.load(); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> fails_remaining_;
    int sleep_ms_;
    int fail_status_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    std::atomic<int> total_requests_{0};
};

GatewayPtr live_gateway(const std::string& url, int concurrency = 4) {
    GatewayConfig config;
    config.mode = GatewayMode::Live;
    config.max_concurrency = concurrency;
    config.retry.base_delay_ms = 2;
    OpenAiConfig provider_config;
    provider_config.base_url = url;
    return std::make_shared<Gateway>(config,
                                     std::make_shared<OpenAiProvider>(provider_config));
}

} // namespace

TEST_CASE("cache keys are stable under identical content") {
    auto a = Gateway::chat_key(simple_request("hello"));
    auto b = Gateway::chat_key(simple_request("hello"));
    auto c = Gateway::chat_key(simple_request("other"));
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == 64);
    // Tag is accounting metadata, not part of the key.
    CHECK(Gateway::chat_key(simple_request("hello", "tag2")) == a);
}

TEST_CASE("replay returns the cached response and misses are typed") {
    auto dir = test_fixtures::fresh_dir("gateway_replay");
    auto cache_path = dir / "cache.jsonl";
    {
        auto recorder = test_fixtures::scripted_gateway(cache_path, GatewayMode::Record);
        ChatRequest request = simple_request(
            "Requirement: r\n\nReference Text: t\n\nAssess whether the requirement aligns "
            "with the reference text by following these steps:");
        request.model_name = "scripted-chat";
        auto live = recorder->chat(request);
        CHECK(!live.from_replay);
    }
    auto replayer = test_fixtures::scripted_gateway(cache_path, GatewayMode::Replay);
    ChatRequest request = simple_request(
        "Requirement: r\n\nReference Text: t\n\nAssess whether the requirement aligns "
        "with the reference text by following these steps:");
    request.model_name = "scripted-chat";
    auto cached = replayer->chat(request);
    CHECK(cached.from_replay);
    CHECK(cached.text.find("Assessment:") != std::string::npos);

    try {
        replayer->chat(simple_request("never recorded"));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CacheMiss);
    }
}

TEST_CASE("record mode persists the exchange before returning") {
    auto dir = test_fixtures::fresh_dir("gateway_record");
    auto cache_path = dir / "cache.jsonl";
    auto gateway = test_fixtures::scripted_gateway(cache_path, GatewayMode::Record);
    gateway->embed({"alpha beta"});
    std::ifstream in(cache_path);
    std::string line;
    REQUIRE(std::getline(in, line));
    auto entry = nlohmann::json::parse(line);
    CHECK(entry["kind"] == "embed");
    CHECK(entry.contains("key"));
    CHECK(entry["request"]["text"] == "alpha beta");
}

TEST_CASE("embeddings are unit-normalized, deterministic, order-preserving") {
    auto dir = test_fixtures::fresh_dir("gateway_embed");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl", GatewayMode::Record);

    auto pair = gateway->embed({"same text", "same text"});
    REQUIRE(pair.size() == 2);
    CHECK(pair[0].values == pair[1].values);

    auto three = gateway->embed({"first alpha", "second beta", "third gamma"});
    REQUIRE(three.size() == 3);
    for (const auto& vec : three) {
        CHECK(vec.norm() == doctest::Approx(1.0).epsilon(1e-6));
    }
    // Order preserved: re-embedding each singly matches the batch slots.
    CHECK(gateway->embed({"first alpha"}).front().values == three[0].values);
    CHECK(gateway->embed({"third gamma"}).front().values == three[2].values);
    CHECK(three[0].values != three[1].values);
}

TEST_CASE("cost report is additive with per-tag partition") {
    StubServer server;
    auto gateway = live_gateway(server.url());
    gateway->chat(simple_request("one", "stage-a"));
    gateway->chat(simple_request("two", "stage-a"));
    gateway->chat(simple_request("three", "stage-b"));

    auto report = gateway->cost_report();
    CHECK(report.by_tag.at("stage-a").live_calls == 2);
    CHECK(report.by_tag.at("stage-a").prompt_tokens == 20);
    CHECK(report.by_tag.at("stage-a").completion_tokens == 10);
    CHECK(report.by_tag.at("stage-b").live_calls == 1);

    std::uint64_t prompt_sum = 0;
    std::uint64_t completion_sum = 0;
    for (const auto& [tag, bucket] : report.by_tag) {
        prompt_sum += bucket.prompt_tokens;
        completion_sum += bucket.completion_tokens;
    }
    CHECK(prompt_sum == report.total.prompt_tokens);
    CHECK(completion_sum == report.total.completion_tokens);
    CHECK(report.total.prompt_tokens + report.total.completion_tokens == 45);
}

TEST_CASE("all-replay runs cost zero") {
    auto dir = test_fixtures::fresh_dir("gateway_zero_cost");
    auto cache_path = dir / "cache.jsonl";
    std::string prompt =
        "Requirement: a\n\nReference Text: b\n\nAssess whether the requirement aligns with "
        "the reference text by following these steps:";
    {
        auto recorder = test_fixtures::scripted_gateway(cache_path, GatewayMode::Record);
        ChatRequest request = simple_request(prompt);
        request.model_name = "scripted-chat";
        recorder->chat(request);
    }
    auto replayer = test_fixtures::scripted_gateway(cache_path, GatewayMode::Replay);
    ChatRequest request = simple_request(prompt);
    request.model_name = "scripted-chat";
    replayer->chat(request);
    auto report = replayer->cost_report();
    CHECK(report.total.live_calls == 0);
    CHECK(report.total.prompt_tokens == 0);
    CHECK(report.total.replay_hits == 1);
}

TEST_CASE("429 twice then 200 succeeds after backoff") {
    StubServer server(/*fail_first_n=*/2);
    auto gateway = live_gateway(server.url());
    auto response = gateway->chat(simple_request("retry me"));
    CHECK(response.text == "stub says hi");
    CHECK(response.usage.prompt_tokens == 10);
    CHECK(server.total_requests() == 3);
}

TEST_CASE("retry budget exhaustion raises ProviderError") {
    StubServer server(/*fail_first_n=*/10);
    auto gateway = live_gateway(server.url());
    try {
        gateway->chat(simple_request("always 429"));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProviderError);
    }
    CHECK(server.total_requests() == 3); // 3 attempts, then give up
}

TEST_CASE("non-retryable 4xx fails on the first attempt") {
    StubServer server(/*fail_first_n=*/10, /*sleep_ms=*/0, /*fail_status=*/400);
    auto gateway = live_gateway(server.url());
    CHECK_THROWS_AS(gateway->chat(simple_request("bad request")), Error);
    CHECK(server.total_requests() == 1);
}

TEST_CASE("recorded HTTP exchanges replay after the server is gone") {
    auto dir = test_fixtures::fresh_dir("gateway_http_replay");
    auto cache_path = dir / "cache.jsonl";
    {
        StubServer server;
        GatewayConfig config;
        config.mode = GatewayMode::Record;
        config.cache_path = cache_path.string();
        OpenAiConfig provider_config;
        provider_config.base_url = server.url();
        Gateway recorder(config, std::make_shared<OpenAiProvider>(provider_config));
        auto live = recorder.chat(simple_request("record me"));
        CHECK(live.text == "stub says hi");
        auto vectors = recorder.embed({"embed me"});
        CHECK(vectors.front().norm() == doctest::Approx(1.0).epsilon(1e-6));
    } // server down from here on

    GatewayConfig config;
    config.mode = GatewayMode::Replay;
    config.cache_path = cache_path.string();
    Gateway replayer(config, nullptr);
    auto cached = replayer.chat(simple_request("record me"));
    CHECK(cached.from_replay);
    CHECK(cached.text == "stub says hi");
    CHECK(cached.usage.prompt_tokens == 10);
    CHECK(replayer.embed({"embed me"}).front().values ==
          replayer.embed({"embed me"}).front().values);
}

TEST_CASE("bounded concurrency holds under parallel callers") {
    StubServer server(/*fail_first_n=*/0, /*sleep_ms=*/25);
    auto gateway = live_gateway(server.url(), /*concurrency=*/2);

    std::vector<std::future<void>> workers;
    for (int i = 0; i < 8; ++i) {
        workers.push_back(std::async(std::launch::async, [&, i] {
            gateway->chat(simple_request("parallel " + std::to_string(i)));
        }));
    }
    for (auto& worker : workers) worker.get();
    CHECK(server.total_requests() == 8);
    CHECK(server.max_in_flight() <= 2);
}

TEST_CASE("live embeddings flow through the OpenAI wire schema") {
    StubServer server;
    auto gateway = live_gateway(server.url());
    auto vectors = gateway->embed({"x", "y"});
    REQUIRE(vectors.size() == 2);
    CHECK(vectors[0].norm() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(vectors[0].values[0] == doctest::Approx(1.0 / 3.0)); // (1,2,2)/3
}

TEST_CASE("the scripted provider rejects prompts it does not recognize") {
    ScriptedProvider provider;
    ChatRequest request;
    request.model_name = "scripted-chat";
    request.messages.push_back({Role::User, "Tell me a story about geese."});
    CHECK_THROWS_AS(provider.chat(request), Error);
}

TEST_CASE("chat requires at least one user message") {
    auto dir = test_fixtures::fresh_dir("gateway_nouser");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl", GatewayMode::Record);
    ChatRequest request;
    request.model_name = "scripted-chat";
    request.messages.push_back({Role::System, "only system"});
    CHECK_THROWS_AS(gateway->chat(request), Error);
}
