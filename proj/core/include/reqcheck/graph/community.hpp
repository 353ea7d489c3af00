#pragma once

#include "reqcheck/graph/knowledge_graph.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace reqcheck::graph {

struct Community {
    std::string community_id;
    std::size_t level = 0; // 0 = coarsest partition
    std::set<NodeKey> members;
    std::optional<std::string> parent; // containing community one level up
};

class CommunityHierarchy {
public:
    const std::vector<Community>& all() const { return communities_; }
    std::size_t level_count() const { return level_count_; }

    std::vector<const Community*> at_level(std::size_t level) const;
    const Community* find(const std::string& community_id) const;
    std::vector<const Community*> children_of(const std::string& community_id) const;

    void add(Community community);

private:
    std::vector<Community> communities_;
    std::size_t level_count_ = 0;
};

using Partition = std::vector<std::set<NodeKey>>;

/// Newman modularity of a partition at the given resolution (gamma), over
/// edge weights. Returns 0 for edgeless graphs.
double modularity(const KnowledgeGraph& graph, const Partition& partition, double resolution);

/// Leiden-style modularity optimization: seeded multi-restart Louvain passes
/// plus a final single-node refinement sweep. Level 0 is the converged
/// (coarsest) partition; deeper levels record the finer intermediate
/// partitions, down to `max_levels` levels. Deterministic for a fixed seed.
/// Nodes in edgeless components end up in singleton communities.
CommunityHierarchy detect_communities(const KnowledgeGraph& graph, double resolution = 1.0,
                                      std::size_t max_levels = 3, std::uint64_t seed = 0);

} // namespace reqcheck::graph
