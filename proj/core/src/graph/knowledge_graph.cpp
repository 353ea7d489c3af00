#include "reqcheck/graph/knowledge_graph.hpp"

#include "reqcheck/common/strings.hpp"

#include <algorithm>
#include <map>

namespace reqcheck::graph {

const Node* KnowledgeGraph::find(const NodeKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return nullptr;
    return &nodes_[it->second];
}

std::size_t KnowledgeGraph::degree(const NodeKey& key) const {
    const Node* node = find(key);
    return node ? node->node_rank : 0;
}

std::vector<std::pair<NodeKey, double>> KnowledgeGraph::neighbors(const NodeKey& key) const {
    std::map<NodeKey, double> acc;
    for (const auto& edge : edges_) {
        if (edge.a == key) acc[edge.b] += edge.weight;
        else if (edge.b == key) acc[edge.a] += edge.weight;
    }
    return {acc.begin(), acc.end()};
}

double KnowledgeGraph::total_edge_weight() const {
    double sum = 0.0;
    for (const auto& edge : edges_) sum += edge.weight;
    return sum;
}

void KnowledgeGraph::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i].key] = i;
}

KnowledgeGraph build_graph(const std::vector<extract::EntityRecord>& entities,
                           const std::vector<extract::RelationRecord>& relations) {
    KnowledgeGraph graph;

    // Nodes, sorted by key. Relations reference entities by bare name, so
    // also build a name -> types lookup for endpoint resolution.
    std::map<NodeKey, Node> nodes;
    std::map<std::string, std::vector<std::string>> types_by_name;
    for (const auto& entity : entities) {
        NodeKey key{strings::to_upper(entity.name), strings::to_lower(entity.entity_type)};
        auto& node = nodes[key];
        node.key = key;
        if (node.description.empty()) node.description = entity.description;
        node.source_chunks.insert(entity.source_chunks.begin(), entity.source_chunks.end());
        auto& types = types_by_name[key.name];
        if (std::find(types.begin(), types.end(), key.entity_type) == types.end()) {
            types.push_back(key.entity_type);
        }
    }
    for (auto& types : types_by_name) std::sort(types.second.begin(), types.second.end());

    auto resolve = [&](const std::string& name, bool& ambiguous) -> std::optional<NodeKey> {
        auto it = types_by_name.find(strings::to_upper(name));
        if (it == types_by_name.end()) return std::nullopt;
        ambiguous = it->second.size() > 1;
        return NodeKey{it->first, it->second.front()};
    };

    struct EdgeAccumulator {
        double weight = 0.0;
        std::vector<std::string> descriptions;
        std::optional<std::pair<NodeKey, NodeKey>> directed_hint;
        std::set<std::string> source_chunks;
    };
    std::map<std::pair<NodeKey, NodeKey>, EdgeAccumulator> edges;

    for (const auto& relation : relations) {
        bool ambiguous_src = false;
        bool ambiguous_tgt = false;
        auto src = resolve(relation.source, ambiguous_src);
        auto tgt = resolve(relation.target, ambiguous_tgt);
        if (!src || !tgt) {
            ++graph.stats_.dangling_dropped;
            continue;
        }
        if (ambiguous_src || ambiguous_tgt) ++graph.stats_.ambiguous_endpoints;
        if (*src == *tgt) {
            ++graph.stats_.self_loops_dropped;
            continue;
        }

        auto pair = std::minmax(*src, *tgt);
        auto& acc = edges[{pair.first, pair.second}];
        acc.weight += relation.strength;
        if (!relation.description.empty() &&
            std::find(acc.descriptions.begin(), acc.descriptions.end(), relation.description) ==
                acc.descriptions.end()) {
            acc.descriptions.push_back(relation.description);
        }
        if (!acc.directed_hint) acc.directed_hint = std::make_pair(*src, *tgt);
        acc.source_chunks.insert(relation.source_chunks.begin(), relation.source_chunks.end());
    }

    graph.nodes_.reserve(nodes.size());
    for (auto& [key, node] : nodes) graph.nodes_.push_back(std::move(node));
    graph.rebuild_index();

    graph.edges_.reserve(edges.size());
    for (auto& [pair, acc] : edges) {
        Edge edge;
        edge.a = pair.first;
        edge.b = pair.second;
        edge.weight = acc.weight;
        edge.description = strings::join(acc.descriptions, "\n");
        edge.directed_hint = acc.directed_hint;
        edge.source_chunks = std::move(acc.source_chunks);
        graph.edges_.push_back(std::move(edge));

        ++graph.nodes_[graph.index_[pair.first]].node_rank;
        ++graph.nodes_[graph.index_[pair.second]].node_rank;
    }

    return graph;
}

KnowledgeGraph graph_from_parts(std::vector<Node> nodes, std::vector<Edge> edges) {
    KnowledgeGraph graph;
    graph.nodes_ = std::move(nodes);
    std::sort(graph.nodes_.begin(), graph.nodes_.end(),
              [](const Node& a, const Node& b) { return a.key < b.key; });
    for (auto& node : graph.nodes_) node.node_rank = 0;
    graph.rebuild_index();

    for (auto& edge : edges) {
        if (edge.b < edge.a) std::swap(edge.a, edge.b);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    graph.edges_.reserve(edges.size());
    for (auto& edge : edges) {
        auto a = graph.index_.find(edge.a);
        auto b = graph.index_.find(edge.b);
        if (a == graph.index_.end() || b == graph.index_.end() || edge.a == edge.b) {
            ++graph.stats_.dangling_dropped;
            continue;
        }
        ++graph.nodes_[a->second].node_rank;
        ++graph.nodes_[b->second].node_rank;
        graph.edges_.push_back(std::move(edge));
    }
    return graph;
}

} // namespace reqcheck::graph
