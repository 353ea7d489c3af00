#include "reqcheck/llm/gateway.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/sha256.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <thread>

namespace reqcheck::llm {

using nlohmann::ordered_json;

const char* to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(const std::string& text) {
    if (text == "system") return Role::System;
    if (text == "assistant") return Role::Assistant;
    return Role::User;
}

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

void EmbeddingVector::normalize() {
    double n = norm();
    if (n <= 0.0) return;
    for (double& v : values) v /= n;
}

GatewayMode gateway_mode_from_string(const std::string& text) {
    if (text == "live") return GatewayMode::Live;
    if (text == "record") return GatewayMode::Record;
    if (text == "replay") return GatewayMode::Replay;
    throw Error(ErrorCode::ConfigError, "unknown gateway mode: " + text);
}

const char* to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::Live: return "live";
        case GatewayMode::Record: return "record";
        case GatewayMode::Replay: return "replay";
    }
    return "replay";
}

// Runtime-sized counting semaphore (std::counting_semaphore fixes the max at
// compile time).
class Gateway::Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int count_;
};

namespace {

template <typename Sem>
struct SemaphoreGuard {
    explicit SemaphoreGuard(Sem& sem) : sem_(sem) { sem_.acquire(); }
    ~SemaphoreGuard() { sem_.release(); }
    Sem& sem_;
};

} // namespace

Gateway::~Gateway() = default;

Gateway::Gateway(GatewayConfig config, ProviderPtr provider)
    : config_(std::move(config)), provider_(std::move(provider)) {
    if (config_.mode != GatewayMode::Live) {
        if (config_.cache_path.empty()) {
            throw Error(ErrorCode::ConfigError,
                        "record/replay mode requires a cache path");
        }
        cache_ = std::make_unique<ReplayCache>(config_.cache_path);
    }
    if (config_.mode != GatewayMode::Replay && !provider_) {
        throw Error(ErrorCode::ConfigError, "live/record mode requires a provider");
    }
    semaphore_ = std::make_unique<Semaphore>(std::max(1, config_.max_concurrency));
}

std::string Gateway::chat_key(const ChatRequest& request) {
    ordered_json canonical;
    canonical["model"] = request.model_name;
    canonical["temperature"] = request.temperature;
    ordered_json messages = ordered_json::array();
    for (const auto& message : request.messages) {
        ordered_json m;
        m["role"] = to_string(message.role);
        m["content"] = message.content;
        messages.push_back(std::move(m));
    }
    canonical["messages"] = std::move(messages);
    return Sha256::hex(canonical.dump());
}

std::string Gateway::embed_key(const std::string& model_name, const std::string& text) {
    ordered_json canonical;
    canonical["embed"] = model_name;
    canonical["text"] = text;
    return Sha256::hex(canonical.dump());
}

void Gateway::throttled_sleep(int attempt) {
    auto delay = std::chrono::milliseconds(
        static_cast<long>(config_.retry.base_delay_ms) * (1L << attempt));
    std::this_thread::sleep_for(delay);
}

ChatResponse Gateway::call_provider_with_retry(const ChatRequest& request) {
    SemaphoreGuard guard(*semaphore_);
    int attempt = 0;
    while (true) {
        try {
            return provider_->chat(request);
        } catch (const Error& e) {
            bool retryable = e.code() == ErrorCode::ProviderError &&
                             std::string(e.what()).find("[retryable]") != std::string::npos;
            if (!retryable || attempt + 1 >= config_.retry.max_attempts) throw;
            throttled_sleep(attempt);
            ++attempt;
        }
    }
}

std::vector<EmbeddingVector> Gateway::embed_provider_with_retry(
    const std::vector<std::string>& texts) {
    SemaphoreGuard guard(*semaphore_);
    int attempt = 0;
    while (true) {
        try {
            return provider_->embed(config_.embedding_model, texts);
        } catch (const Error& e) {
            bool retryable = e.code() == ErrorCode::ProviderError &&
                             std::string(e.what()).find("[retryable]") != std::string::npos;
            if (!retryable || attempt + 1 >= config_.retry.max_attempts) throw;
            throttled_sleep(attempt);
            ++attempt;
        }
    }
}

void Gateway::account(const std::string& tag, const Usage& usage, bool replay_hit) {
    std::lock_guard lock(cost_mutex_);
    auto& bucket = costs_[tag.empty() ? "untagged" : tag];
    if (replay_hit) {
        ++bucket.replay_hits;
    } else {
        ++bucket.live_calls;
        bucket.prompt_tokens += usage.prompt_tokens;
        bucket.completion_tokens += usage.completion_tokens;
    }
}

ChatResponse Gateway::chat(const ChatRequest& request) {
    bool has_user = false;
    for (const auto& message : request.messages) {
        if (message.role == Role::User) has_user = true;
    }
    if (!has_user) {
        throw Error(ErrorCode::ConfigError, "chat request needs at least one user message");
    }

    const std::string key = chat_key(request);

    if (cache_) {
        if (auto hit = cache_->lookup_chat_with_usage(key)) {
            ChatResponse response;
            response.text = hit->first;
            response.usage = hit->second;
            response.provider_id = "replay";
            response.from_replay = true;
            account(request.request_tag, response.usage, /*replay_hit=*/true);
            return response;
        }
        if (config_.mode == GatewayMode::Replay) {
            throw Error(ErrorCode::CacheMiss,
                        "no recorded response for request tagged '" + request.request_tag +
                            "' (key " + key.substr(0, 12) + "...)");
        }
    }

    ChatResponse response = call_provider_with_retry(request);
    response.from_replay = false;
    if (config_.mode == GatewayMode::Record) {
        cache_->store_chat(key, request, response); // persisted before return
    }
    account(request.request_tag, response.usage, /*replay_hit=*/false);
    return response;
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts,
                                            const std::string& request_tag) {
    if (texts.empty()) {
        throw Error(ErrorCode::ConfigError, "embed() requires a non-empty text list");
    }

    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;

    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::string key = embed_key(config_.embedding_model, texts[i]);
        if (cache_) {
            if (auto hit = cache_->lookup_embedding(key)) {
                out[i].values = *hit;
                account(request_tag, {}, /*replay_hit=*/true);
                continue;
            }
            if (config_.mode == GatewayMode::Replay) {
                throw Error(ErrorCode::CacheMiss,
                            "no recorded embedding (key " + key.substr(0, 12) + "...)");
            }
        }
        missing.push_back(i);
    }

    if (!missing.empty()) {
        std::vector<std::string> batch;
        batch.reserve(missing.size());
        for (auto i : missing) batch.push_back(texts[i]);

        auto vectors = embed_provider_with_retry(batch);
        if (vectors.size() != batch.size()) {
            throw Error(ErrorCode::ProviderError,
                        "embedding provider returned " + std::to_string(vectors.size()) +
                            " vectors for " + std::to_string(batch.size()) + " texts");
        }
        for (std::size_t k = 0; k < missing.size(); ++k) {
            auto& vec = vectors[k];
            vec.normalize();
            const std::size_t i = missing[k];
            out[i] = vec;
            if (config_.mode == GatewayMode::Record) {
                cache_->store_embedding(embed_key(config_.embedding_model, texts[i]),
                                        config_.embedding_model, texts[i], vec.values);
            }
            // Rough token accounting for embeddings: whitespace-split words.
            Usage usage;
            usage.prompt_tokens = 1 + std::count(texts[i].begin(), texts[i].end(), ' ');
            account(request_tag, usage, /*replay_hit=*/false);
        }
    }

    const std::size_t dim = out.front().dimension();
    for (auto& vec : out) {
        vec.normalize();
        if (vec.dimension() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "embedding dimensions differ in batch");
        }
    }
    return out;
}

CostReport Gateway::cost_report() const {
    std::lock_guard lock(cost_mutex_);
    CostReport report;
    report.by_tag = costs_;
    for (const auto& [tag, bucket] : costs_) {
        report.total.live_calls += bucket.live_calls;
        report.total.replay_hits += bucket.replay_hits;
        report.total.prompt_tokens += bucket.prompt_tokens;
        report.total.completion_tokens += bucket.completion_tokens;
    }
    return report;
}

} // namespace reqcheck::llm
