#include "reqcheck/graph/ranking.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/corpus/clean.hpp"
#include "reqcheck/retrieval/similarity.hpp"

#include <algorithm>

namespace reqcheck::graph {

std::vector<const Community*> children_or_roots(const CommunityHierarchy& hierarchy,
                                                const std::string& parent_id) {
    if (parent_id.empty()) return hierarchy.at_level(0);
    return hierarchy.children_of(parent_id);
}

SubCommunityRanking rank_subcommunities(const KnowledgeGraph& graph,
                                        const std::vector<const Community*>& children,
                                        const std::map<std::string, CommunityReport>& reports,
                                        const std::string& query_terms, double threshold,
                                        const RankingConfig& config, llm::Gateway* gateway) {
    if (children.empty()) {
        throw Error(ErrorCode::ConfigError, "rank_subcommunities requires children");
    }

    // Static part: normalized degree-mass plus mean entity-type prior.
    std::vector<double> degree_mass(children.size(), 0.0);
    std::vector<double> prior(children.size(), 0.0);
    double max_mass = 0.0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        double mass = 0.0;
        double prior_sum = 0.0;
        for (const auto& key : children[i]->members) {
            mass += static_cast<double>(graph.degree(key));
            auto it = config.type_priors.find(key.entity_type);
            prior_sum += it == config.type_priors.end() ? 0.5 : it->second;
        }
        degree_mass[i] = mass;
        prior[i] = children[i]->members.empty()
                       ? 0.0
                       : prior_sum / static_cast<double>(children[i]->members.size());
        max_mass = std::max(max_mass, mass);
    }

    const std::string stripped_query = corpus::strip_query_stopwords(query_terms);
    const bool dynamic_active = !stripped_query.empty();

    std::vector<double> dynamic(children.size(), 0.0);
    if (dynamic_active) {
        if (!gateway) {
            throw Error(ErrorCode::ConfigError, "query ranking requires a gateway");
        }
        std::vector<std::string> texts;
        texts.reserve(children.size() + 1);
        texts.push_back(stripped_query);
        for (const auto* child : children) {
            texts.push_back(community_summary_text(graph, *child, reports));
        }
        auto vectors = gateway->embed(texts, "rank-subcommunities");
        for (std::size_t i = 0; i < children.size(); ++i) {
            dynamic[i] = retrieval::cosine_similarity(vectors.front(), vectors[i + 1]);
        }
    }

    SubCommunityRanking ranking;
    ranking.entries.reserve(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) {
        RankedSubCommunity entry;
        entry.community_id = children[i]->community_id;
        double mass_norm = max_mass > 0.0 ? degree_mass[i] / max_mass : 0.0;
        entry.static_score = (mass_norm + prior[i]) / 2.0;
        entry.dynamic_score = dynamic[i];
        entry.final_score = dynamic_active ? config.static_weight * entry.static_score +
                                                 config.dynamic_weight * entry.dynamic_score
                                           : entry.static_score;
        entry.passed_threshold = !dynamic_active || entry.dynamic_score >= threshold;
        ranking.entries.push_back(std::move(entry));
    }

    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const RankedSubCommunity& a, const RankedSubCommunity& b) {
                  if (a.passed_threshold != b.passed_threshold) return a.passed_threshold;
                  if (a.final_score != b.final_score) return a.final_score > b.final_score;
                  return a.community_id < b.community_id;
              });
    return ranking;
}

} // namespace reqcheck::graph
