#include "reqcheck/graph/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace reqcheck::graph {

void CommunityHierarchy::add(Community community) {
    level_count_ = std::max(level_count_, community.level + 1);
    communities_.push_back(std::move(community));
}

std::vector<const Community*> CommunityHierarchy::at_level(std::size_t level) const {
    std::vector<const Community*> out;
    for (const auto& community : communities_) {
        if (community.level == level) out.push_back(&community);
    }
    return out;
}

const Community* CommunityHierarchy::find(const std::string& community_id) const {
    for (const auto& community : communities_) {
        if (community.community_id == community_id) return &community;
    }
    return nullptr;
}

std::vector<const Community*> CommunityHierarchy::children_of(
    const std::string& community_id) const {
    std::vector<const Community*> out;
    for (const auto& community : communities_) {
        if (community.parent && *community.parent == community_id) out.push_back(&community);
    }
    return out;
}

namespace {

// Flat working view of the graph: indices instead of keys.
struct FlatGraph {
    std::vector<NodeKey> keys;                       // index -> key, sorted
    std::vector<std::vector<std::pair<int, double>>> adj; // symmetric adjacency
    std::vector<double> degree;                      // weighted degree
    double total_weight = 0.0;                       // m

    explicit FlatGraph(const KnowledgeGraph& graph) {
        keys.reserve(graph.nodes().size());
        for (const auto& node : graph.nodes()) keys.push_back(node.key);
        std::map<NodeKey, int> index;
        for (int i = 0; i < static_cast<int>(keys.size()); ++i) index[keys[i]] = i;

        adj.assign(keys.size(), {});
        degree.assign(keys.size(), 0.0);
        for (const auto& edge : graph.edges()) {
            int u = index.at(edge.a);
            int v = index.at(edge.b);
            adj[u].emplace_back(v, edge.weight);
            adj[v].emplace_back(u, edge.weight);
            degree[u] += edge.weight;
            degree[v] += edge.weight;
            total_weight += edge.weight;
        }
    }
};

// One level of Louvain local moving over an aggregated graph.
struct LevelGraph {
    int n = 0;
    std::vector<std::map<int, double>> adj; // neighbor -> weight, no self entries
    std::vector<double> self_loop;          // collapsed intra weight
    std::vector<double> degree;             // 2*self_loop + sum(adj)
};

// Moves single nodes between communities (or out into fresh singletons)
// until no strictly positive modularity gain remains. Returns true if
// anything moved. `order` controls sweep order; moves are strict-improvement
// only, so the sweep terminates and is deterministic.
bool local_moving(const LevelGraph& graph, std::vector<int>& community, double m,
                  double resolution, const std::vector<int>& order, int& next_label) {
    std::map<int, double> tot; // sum of degrees per community label
    for (int u = 0; u < graph.n; ++u) tot[community[u]] += graph.degree[u];

    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int u : order) {
            const int from = community[u];
            // Weights from u to each adjacent community.
            std::map<int, double> links;
            for (const auto& [v, w] : graph.adj[u]) links[community[v]] += w;

            tot[from] -= graph.degree[u];
            const double k_u = graph.degree[u];
            const double stay =
                (links.count(from) ? links[from] : 0.0) / m -
                resolution * tot[from] * k_u / (2.0 * m * m);

            // Baseline: detach into a fresh singleton (gain 0); staying put
            // wins ties so converged states stay converged.
            int best = stay >= 0.0 ? from : -1;
            double best_gain = std::max(stay, 0.0);
            for (const auto& [c, k_in] : links) {
                if (c == from) continue;
                double gain = k_in / m - resolution * tot[c] * k_u / (2.0 * m * m);
                if (gain > best_gain + 1e-12) {
                    best = c;
                    best_gain = gain;
                }
            }

            const int target = best == -1 ? next_label++ : best;
            tot[target] += k_u;
            if (target != from) {
                community[u] = target;
                improved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

// Renumbers community labels to 0..k-1 (order of first appearance).
int compact_labels(std::vector<int>& community) {
    std::map<int, int> remap;
    for (int& c : community) {
        auto [it, inserted] = remap.emplace(c, static_cast<int>(remap.size()));
        c = it->second;
    }
    return static_cast<int>(remap.size());
}

LevelGraph aggregate(const LevelGraph& graph, const std::vector<int>& community, int k) {
    LevelGraph out;
    out.n = k;
    out.adj.assign(k, {});
    out.self_loop.assign(k, 0.0);
    out.degree.assign(k, 0.0);

    for (int u = 0; u < graph.n; ++u) {
        out.self_loop[community[u]] += graph.self_loop[u];
        for (const auto& [v, w] : graph.adj[u]) {
            if (v < u) continue; // visit each undirected pair once
            int cu = community[u];
            int cv = community[v];
            if (cu == cv) {
                out.self_loop[cu] += w;
            } else {
                out.adj[cu][cv] += w;
                out.adj[cv][cu] += w;
            }
        }
    }
    for (int c = 0; c < k; ++c) {
        out.degree[c] = 2.0 * out.self_loop[c];
        for (const auto& [v, w] : out.adj[c]) out.degree[c] += w;
    }
    return out;
}

// Composes per-level assignments down to original node indices.
std::vector<int> compose(const std::vector<int>& base, const std::vector<int>& next) {
    std::vector<int> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = next[base[i]];
    return out;
}

Partition to_partition(const FlatGraph& flat, const std::vector<int>& assignment) {
    int k = *std::max_element(assignment.begin(), assignment.end()) + 1;
    std::vector<std::set<NodeKey>> groups(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        groups[assignment[i]].insert(flat.keys[i]);
    }
    Partition partition;
    for (auto& group : groups) {
        if (!group.empty()) partition.push_back(std::move(group));
    }
    // Canonical order: by smallest member.
    std::sort(partition.begin(), partition.end(),
              [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
    return partition;
}

double modularity_of_assignment(const FlatGraph& flat, const std::vector<int>& assignment,
                                double resolution) {
    if (flat.total_weight <= 0.0) return 0.0;
    const double m = flat.total_weight;
    std::map<int, double> intra;
    std::map<int, double> tot;
    for (int u = 0; u < static_cast<int>(flat.keys.size()); ++u) {
        tot[assignment[u]] += flat.degree[u];
        for (const auto& [v, w] : flat.adj[u]) {
            if (v > u && assignment[v] == assignment[u]) intra[assignment[u]] += w;
        }
    }
    double q = 0.0;
    for (const auto& [c, t] : tot) {
        double in = intra.count(c) ? intra[c] : 0.0;
        q += in / m - resolution * (t / (2.0 * m)) * (t / (2.0 * m));
    }
    return q;
}

LevelGraph level_from_flat(const FlatGraph& flat) {
    LevelGraph level;
    level.n = static_cast<int>(flat.keys.size());
    level.adj.assign(level.n, {});
    level.self_loop.assign(level.n, 0.0);
    level.degree = flat.degree;
    for (int u = 0; u < level.n; ++u) {
        for (const auto& [v, w] : flat.adj[u]) level.adj[u][v] = w;
    }
    return level;
}

// Single-node refinement on the original graph: a final Leiden-style sweep
// that can correct nodes locked in by early aggregation.
void refine_flat(const FlatGraph& flat, std::vector<int>& assignment, double resolution) {
    if (flat.total_weight <= 0.0) return;
    LevelGraph level = level_from_flat(flat);
    std::vector<int> order(level.n);
    std::iota(order.begin(), order.end(), 0);
    int next_label = *std::max_element(assignment.begin(), assignment.end()) + 1;
    local_moving(level, assignment, flat.total_weight, resolution, order, next_label);
}

} // namespace

double modularity(const KnowledgeGraph& graph, const Partition& partition, double resolution) {
    FlatGraph flat(graph);
    if (flat.total_weight <= 0.0) return 0.0;
    std::map<NodeKey, int> label;
    for (int c = 0; c < static_cast<int>(partition.size()); ++c) {
        for (const auto& key : partition[c]) label[key] = c;
    }
    std::vector<int> assignment(flat.keys.size(), 0);
    for (std::size_t i = 0; i < flat.keys.size(); ++i) assignment[i] = label.at(flat.keys[i]);
    return modularity_of_assignment(flat, assignment, resolution);
}

CommunityHierarchy detect_communities(const KnowledgeGraph& graph, double resolution,
                                      std::size_t max_levels, std::uint64_t seed) {
    CommunityHierarchy hierarchy;
    if (graph.empty()) return hierarchy;
    if (max_levels == 0) max_levels = 1;

    FlatGraph flat(graph);
    const int n = static_cast<int>(flat.keys.size());

    std::vector<std::vector<int>> best_phases; // finest -> coarsest assignments over original nodes
    double best_q = -2.0;

    if (flat.total_weight <= 0.0) {
        // Edgeless graph: every node its own community, single level.
        std::vector<int> identity(n);
        std::iota(identity.begin(), identity.end(), 0);
        best_phases.push_back(identity);
    } else {
        const int restarts = 8;
        for (int restart = 0; restart < restarts; ++restart) {
            std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(restart));

            LevelGraph level = level_from_flat(flat);

            std::vector<int> overall(n);
            std::iota(overall.begin(), overall.end(), 0);

            std::vector<std::vector<int>> phases;
            while (true) {
                std::vector<int> community(level.n);
                std::iota(community.begin(), community.end(), 0);
                std::vector<int> order(level.n);
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                int next_label = level.n;

                bool moved = local_moving(level, community, flat.total_weight, resolution, order,
                                          next_label);
                int k = compact_labels(community);
                overall = compose(overall, community);
                phases.push_back(overall);
                if (!moved || k == level.n) break;
                level = aggregate(level, community, k);
            }

            double q = modularity_of_assignment(flat, phases.back(), resolution);
            if (q > best_q + 1e-12) {
                best_q = q;
                best_phases = phases;
            }
        }

        // Final refinement sweep on the flat graph.
        std::vector<int> refined = best_phases.back();
        refine_flat(flat, refined, resolution);
        if (modularity_of_assignment(flat, refined, resolution) > best_q + 1e-12) {
            best_phases.push_back(refined);
        }
    }

    // Deduplicate consecutive identical phases, keep coarsest-first order.
    std::vector<Partition> levels; // index 0 = coarsest
    for (auto it = best_phases.rbegin(); it != best_phases.rend(); ++it) {
        Partition partition = to_partition(flat, *it);
        if (!levels.empty() && partition == levels.back()) continue;
        levels.push_back(std::move(partition));
        if (levels.size() == max_levels) break;
    }

    // Enforce nesting: each finer level refines the coarser one above it.
    for (std::size_t depth = 1; depth < levels.size(); ++depth) {
        Partition refined;
        for (const auto& parent : levels[depth - 1]) {
            for (const auto& child : levels[depth]) {
                std::set<NodeKey> common;
                std::set_intersection(child.begin(), child.end(), parent.begin(), parent.end(),
                                      std::inserter(common, common.begin()));
                if (!common.empty()) refined.push_back(std::move(common));
            }
        }
        std::sort(refined.begin(), refined.end(),
                  [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
        levels[depth] = std::move(refined);
    }

    // Drop redundant trailing levels identical to their parent level.
    while (levels.size() > 1 && levels[levels.size() - 1] == levels[levels.size() - 2]) {
        levels.pop_back();
    }

    // Emit Community records with parent links.
    for (std::size_t depth = 0; depth < levels.size(); ++depth) {
        for (std::size_t idx = 0; idx < levels[depth].size(); ++idx) {
            Community community;
            community.level = depth;
            community.community_id = "c" + std::to_string(depth) + "_" + std::to_string(idx);
            community.members = levels[depth][idx];
            if (depth > 0) {
                const auto& sample = *community.members.begin();
                for (std::size_t p = 0; p < levels[depth - 1].size(); ++p) {
                    if (levels[depth - 1][p].count(sample)) {
                        community.parent = "c" + std::to_string(depth - 1) + "_" +
                                           std::to_string(p);
                        break;
                    }
                }
            }
            hierarchy.add(std::move(community));
        }
    }
    return hierarchy;
}

} // namespace reqcheck::graph
