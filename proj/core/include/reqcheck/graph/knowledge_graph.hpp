#pragma once

#include "reqcheck/extract/records.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reqcheck::graph {

/// Node key: entity name plus type, unambiguous across same-named entities
/// of different types.
struct NodeKey {
    std::string name;
    std::string entity_type;

    auto operator<=>(const NodeKey&) const = default;
    std::string str() const { return name + "|" + entity_type; }
};

struct Node {
    NodeKey key;
    std::string description;
    std::set<std::string> source_chunks;
    std::size_t node_rank = 0; // == degree
};

struct Edge {
    NodeKey a; // endpoints stored in sorted order (a < b)
    NodeKey b;
    double weight = 0.0; // sum of constituent relation strengths
    std::string description;
    std::optional<std::pair<NodeKey, NodeKey>> directed_hint; // first relation's (source, target)
    std::set<std::string> source_chunks;
};

struct BuildStats {
    std::size_t dangling_dropped = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t ambiguous_endpoints = 0;
};

/// Homogeneous, undirected, weighted knowledge graph. Parallel relations on
/// the same unordered pair aggregate into one edge; direction survives only
/// as the directed_hint annotation.
class KnowledgeGraph {
public:
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const BuildStats& stats() const { return stats_; }

    const Node* find(const NodeKey& key) const;
    std::size_t degree(const NodeKey& key) const;

    /// Neighbors with accumulated edge weights, sorted by key.
    std::vector<std::pair<NodeKey, double>> neighbors(const NodeKey& key) const;

    bool empty() const { return nodes_.empty(); }
    double total_edge_weight() const;

    friend KnowledgeGraph build_graph(const std::vector<extract::EntityRecord>& entities,
                                      const std::vector<extract::RelationRecord>& relations);
    friend KnowledgeGraph graph_from_parts(std::vector<Node> nodes, std::vector<Edge> edges);

private:
    std::vector<Node> nodes_; // sorted by key
    std::vector<Edge> edges_; // sorted by (a, b)
    std::map<NodeKey, std::size_t> index_;
    BuildStats stats_;

    void rebuild_index();
};

/// Builds the graph from merged extraction records. Relations whose endpoint
/// names match no entity are dropped (counted in stats); a name matching
/// entities of several types binds to the lexicographically first type and
/// counts as ambiguous. Edge weight is the sum of the strengths of all
/// relations on the unordered pair; node_rank is recomputed as degree.
KnowledgeGraph build_graph(const std::vector<extract::EntityRecord>& entities,
                           const std::vector<extract::RelationRecord>& relations);

/// Reassembles a graph from already-resolved nodes and edges (the load path).
/// Ranks are recomputed; nodes/edges are sorted canonically.
KnowledgeGraph graph_from_parts(std::vector<Node> nodes, std::vector<Edge> edges);

} // namespace reqcheck::graph
