#pragma once

#include "reqcheck/graph/persist.hpp"
#include "reqcheck/graph/ranking.hpp"
#include "reqcheck/llm/gateway.hpp"

#include <set>
#include <string>
#include <vector>

namespace reqcheck::retrieval {

struct Provenance {
    std::set<std::string> entity_keys;
    std::string community_id;
    std::set<std::string> chunk_ids;
};

struct RetrievalItem {
    std::string text;
    double similarity = 0.0; // in [-1,1]
    Provenance provenance;
};

struct RetrievalResult {
    std::string query_req_id;
    std::vector<RetrievalItem> items; // similarity descending, ties by chunk id
    double threshold_used = 0.0;
};

struct SearchConfig {
    /// Minimum community dynamic score for its passages to become candidates.
    /// Community-summary similarities run systematically lower than passage
    /// similarities, so the default keeps every community in play and lets
    /// the per-item threshold do the filtering.
    double community_gate = -1.0;
    graph::RankingConfig ranking;
};

/// Graph retrieval: ranks sub-communities against the requirement, collects
/// the reference-document chunks attached to entities of communities passing
/// the gate, scores each passage by cosine similarity against the
/// requirement embedding and drops items below `threshold`. Requirement-kind
/// documents are never retrievable.
RetrievalResult query_graph(const graph::GraphIndex& index, const std::string& req_id,
                            const std::string& requirement_text, double threshold,
                            llm::Gateway& gateway, const SearchConfig& config = {});

} // namespace reqcheck::retrieval
