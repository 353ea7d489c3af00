#pragma once

#include "reqcheck/llm/provider.hpp"
#include "reqcheck/llm/replay_cache.hpp"
#include "reqcheck/llm/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace reqcheck::llm {

enum class GatewayMode { Live, Record, Replay };

GatewayMode gateway_mode_from_string(const std::string& text);
const char* to_string(GatewayMode mode);

struct RetryPolicy {
    int max_attempts = 3;
    int base_delay_ms = 250; // doubled per attempt
};

struct GatewayConfig {
    GatewayMode mode = GatewayMode::Replay;
    std::string cache_path; // required for record/replay
    std::string chat_model = "gpt-4o";
    std::string embedding_model = "text-embedding-3-small";
    int max_concurrency = 4;
    RetryPolicy retry;
};

struct CostBucket {
    std::uint64_t live_calls = 0;
    std::uint64_t replay_hits = 0;
    std::uint64_t prompt_tokens = 0;     // live only; replay hits cost zero
    std::uint64_t completion_tokens = 0; // live only
};

struct CostReport {
    std::map<std::string, CostBucket> by_tag; // ordered for deterministic output
    CostBucket total;
};

/// Uniform front door to chat/embedding providers with deterministic
/// record/replay, bounded concurrency, retries and cost accounting.
///
/// Cache keys are content hashes of a canonical serialization of
/// (model, temperature, messages) — field order fixed — so semantically
/// identical requests always hit.
class Gateway {
public:
    Gateway(GatewayConfig config, ProviderPtr provider);
    ~Gateway();

    ChatResponse chat(const ChatRequest& request);

    /// One unit-normalized vector per text, order preserved. `request_tag`
    /// buckets the cost accounting.
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts,
                                       const std::string& request_tag = "embed");

    CostReport cost_report() const;

    const GatewayConfig& config() const { return config_; }

    static std::string chat_key(const ChatRequest& request);
    static std::string embed_key(const std::string& model_name, const std::string& text);

private:
    ChatResponse call_provider_with_retry(const ChatRequest& request);
    std::vector<EmbeddingVector> embed_provider_with_retry(const std::vector<std::string>& texts);
    void account(const std::string& tag, const Usage& usage, bool replay_hit);
    void throttled_sleep(int attempt);

    GatewayConfig config_;
    ProviderPtr provider_;
    std::unique_ptr<ReplayCache> cache_;

    mutable std::mutex cost_mutex_;
    std::map<std::string, CostBucket> costs_;

    class Semaphore;
    std::unique_ptr<Semaphore> semaphore_;
};

using GatewayPtr = std::shared_ptr<Gateway>;

} // namespace reqcheck::llm
