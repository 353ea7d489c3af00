#pragma once

#include "reqcheck/llm/provider.hpp"

#include <string>

namespace reqcheck::llm {

struct OpenAiConfig {
    std::string base_url = "http://localhost:8080"; // scheme://host[:port]
    std::string api_path_prefix = "/v1";
    std::string api_key; // from environment only, never from config files
    int timeout_seconds = 120;
};

/// Chat/embeddings over the OpenAI-compatible HTTP wire schema; any
/// compatible server works. HTTP 429/5xx and transport failures are
/// reported as retryable provider errors.
class OpenAiProvider : public Provider {
public:
    explicit OpenAiProvider(OpenAiConfig config);

    ChatResponse chat(const ChatRequest& request) override;
    std::vector<EmbeddingVector> embed(const std::string& model_name,
                                       const std::vector<std::string>& texts) override;
    std::string id() const override { return "openai:" + config_.base_url; }

private:
    OpenAiConfig config_;
};

} // namespace reqcheck::llm
