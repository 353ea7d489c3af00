#pragma once

#include "reqcheck/graph/community.hpp"
#include "reqcheck/graph/knowledge_graph.hpp"
#include "reqcheck/graph/report.hpp"
#include "reqcheck/llm/gateway.hpp"

#include <map>
#include <string>
#include <vector>

namespace reqcheck::graph {

struct RankingConfig {
    double static_weight = 0.5;
    double dynamic_weight = 0.5;
    /// Predefined importance by entity type; unlisted types score 0.5.
    std::map<std::string, double> type_priors = {
        {"article", 1.0}, {"standard", 0.8}, {"requirement", 0.6}};
};

struct RankedSubCommunity {
    std::string community_id;
    double static_score = 0.0;  // (normalized degree-mass + type prior) / 2
    double dynamic_score = 0.0; // cosine(query embedding, summary embedding)
    double final_score = 0.0;
    bool passed_threshold = true;
};

struct SubCommunityRanking {
    std::vector<RankedSubCommunity> entries; // demoted (below-threshold) after passing
};

/// Ranks sibling sub-communities. With a query, static scores blend with the
/// cosine similarity between the query terms (stop words stripped) and each
/// community's summary text; children whose dynamic score falls below
/// `threshold` are demoted below every passing child but never removed.
/// With an empty query the ordering is purely static and no embedding calls
/// are made. Ties break by community_id ascending.
SubCommunityRanking rank_subcommunities(const KnowledgeGraph& graph,
                                        const std::vector<const Community*>& children,
                                        const std::map<std::string, CommunityReport>& reports,
                                        const std::string& query_terms, double threshold,
                                        const RankingConfig& config, llm::Gateway* gateway);

/// Children of `parent_id`, or the level-0 communities when `parent_id` is
/// empty (the virtual root).
std::vector<const Community*> children_or_roots(const CommunityHierarchy& hierarchy,
                                                const std::string& parent_id);

} // namespace reqcheck::graph
