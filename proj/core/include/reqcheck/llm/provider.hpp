#pragma once

#include "reqcheck/llm/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace reqcheck::llm {

/// A chat/embedding backend. Implementations must be safe for concurrent use.
class Provider {
public:
    virtual ~Provider() = default;

    virtual ChatResponse chat(const ChatRequest& request) = 0;

    /// One vector per input text, all the same dimension. Vectors need not be
    /// normalized; the gateway normalizes to unit L2.
    virtual std::vector<EmbeddingVector> embed(const std::string& model_name,
                                               const std::vector<std::string>& texts) = 0;

    virtual std::string id() const = 0;
};

using ProviderPtr = std::shared_ptr<Provider>;

} // namespace reqcheck::llm
