#include "reqcheck/llm/openai_provider.hpp"

#include "reqcheck/common/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace reqcheck::llm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(int status, const std::string& detail) {
    const bool retryable = status == 0 || status == 429 || status >= 500;
    std::string message = "HTTP " + std::to_string(status) + " " + detail;
    if (retryable) message += " [retryable]";
    throw Error(ErrorCode::ProviderError, message);
}

json post_json(const OpenAiConfig& config, const std::string& path, const json& body) {
    httplib::Client client(config.base_url);
    client.set_read_timeout(config.timeout_seconds, 0);
    client.set_connection_timeout(config.timeout_seconds, 0);

    httplib::Headers headers;
    if (!config.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config.api_key);
    }

    auto result = client.Post(config.api_path_prefix + path, headers, body.dump(),
                              "application/json");
    if (!result) {
        fail(0, "transport error: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
        fail(result->status, result->body.substr(0, 200));
    }
    try {
        return json::parse(result->body);
    } catch (const json::exception& e) {
        fail(result->status, std::string("bad JSON: ") + e.what());
    }
}

} // namespace

OpenAiProvider::OpenAiProvider(OpenAiConfig config) : config_(std::move(config)) {}

ChatResponse OpenAiProvider::chat(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.content}});
    }
    json body = {
        {"model", request.model_name},
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };

    json reply = post_json(config_, "/chat/completions", body);

    ChatResponse response;
    try {
        response.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProviderError, std::string("unexpected chat schema: ") + e.what());
    }
    if (reply.contains("usage")) {
        response.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0ULL);
        response.usage.completion_tokens = reply["usage"].value("completion_tokens", 0ULL);
    }
    response.provider_id = id();
    return response;
}

std::vector<EmbeddingVector> OpenAiProvider::embed(const std::string& model_name,
                                                   const std::vector<std::string>& texts) {
    json body = {{"model", model_name}, {"input", texts}};
    json reply = post_json(config_, "/embeddings", body);

    std::vector<EmbeddingVector> vectors(texts.size());
    try {
        for (const auto& item : reply.at("data")) {
            std::size_t index = item.at("index").get<std::size_t>();
            if (index >= vectors.size()) continue;
            vectors[index].values = item.at("embedding").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProviderError,
                    std::string("unexpected embeddings schema: ") + e.what());
    }
    for (const auto& vec : vectors) {
        if (vec.values.empty()) {
            throw Error(ErrorCode::ProviderError, "embeddings response missing vectors");
        }
    }
    return vectors;
}

} // namespace reqcheck::llm
