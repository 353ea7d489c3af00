#pragma once

#include "reqcheck/llm/provider.hpp"

namespace reqcheck::llm {

/// Deterministic offline provider: recognizes each pipeline prompt by its
/// template skeleton and answers with rule-derived, well-formed output.
/// Extraction finds clause/article/acronym patterns in the chunk text;
/// conformance stages compare the numeric tokens of requirement vs reference
/// (mirroring word-replacement manipulations); embeddings are hashed
/// bags of content words, so lexical overlap drives cosine similarity.
///
/// Exists so the full pipeline can run, record and replay with zero network
/// access; it is also the natural fixture backend for tests and demos.
class ScriptedProvider : public Provider {
public:
    ChatResponse chat(const ChatRequest& request) override;
    std::vector<EmbeddingVector> embed(const std::string& model_name,
                                       const std::vector<std::string>& texts) override;
    std::string id() const override { return "scripted"; }

    /// Embedding dimension of the hashed bag-of-words vectors.
    static constexpr std::size_t kDimension = 128;
};

} // namespace reqcheck::llm
