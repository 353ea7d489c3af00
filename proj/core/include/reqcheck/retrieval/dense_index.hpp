#pragma once

#include "reqcheck/llm/gateway.hpp"
#include "reqcheck/llm/types.hpp"

#include <string>
#include <vector>

namespace reqcheck::retrieval {

struct DenseEntry {
    std::string ref_id; // chunk or document id
    std::string text;
    llm::EmbeddingVector embedding; // unit norm
};

/// Baseline RAG index: dense vectors over reference passages, scanned
/// exhaustively (desk-scale corpora; no ANN structure needed).
struct DenseIndex {
    std::vector<DenseEntry> entries;
    std::size_t dimension = 0;
};

struct ScoredEntry {
    std::string ref_id;
    std::string text;
    double similarity = 0.0;
};

DenseIndex baseline_build(const std::vector<std::pair<std::string, std::string>>& id_texts,
                          llm::Gateway& gateway);

/// Top-k by cosine similarity, ties broken by entry ordinal. k beyond the
/// corpus size returns everything. Throws EmptyIndex.
std::vector<ScoredEntry> baseline_retrieve(const DenseIndex& index, const std::string& query,
                                           std::size_t k, llm::Gateway& gateway);

} // namespace reqcheck::retrieval
