#include "reqcheck/retrieval/graph_search.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/retrieval/similarity.hpp"

#include <algorithm>
#include <map>

namespace reqcheck::retrieval {

RetrievalResult query_graph(const graph::GraphIndex& index, const std::string& req_id,
                            const std::string& requirement_text, double threshold,
                            llm::Gateway& gateway, const SearchConfig& config) {
    if (threshold < 0.0 || threshold > 1.0) {
        throw Error(ErrorCode::ConfigError, "similarity threshold must be in [0,1]");
    }
    if (index.graph.empty() || index.chunks.empty()) {
        throw Error(ErrorCode::EmptyIndex, "graph index has no content");
    }

    RetrievalResult result;
    result.query_req_id = req_id;
    result.threshold_used = threshold;

    auto roots = graph::children_or_roots(index.communities, "");
    if (roots.empty()) {
        // No community structure: treat the whole node set as one community.
        throw Error(ErrorCode::EmptyIndex, "graph index has no communities");
    }

    auto ranking = graph::rank_subcommunities(index.graph, roots, index.reports,
                                              requirement_text, threshold, config.ranking,
                                              &gateway);

    // Chunk lookup and document-kind filter.
    std::map<std::string, const corpus::Chunk*> chunk_by_id;
    for (const auto& chunk : index.chunks) chunk_by_id[chunk.chunk_id] = &chunk;
    auto is_reference_chunk = [&](const std::string& chunk_id) {
        auto it = chunk_by_id.find(chunk_id);
        if (it == chunk_by_id.end()) return false;
        auto kind = index.document_kinds.find(it->second->doc_id);
        return kind != index.document_kinds.end() &&
               kind->second == corpus::DocumentKind::Reference;
    };

    // Candidate chunks from communities passing the gate, with provenance.
    struct Candidate {
        std::set<std::string> entity_keys;
        std::string community_id;
    };
    std::map<std::string, Candidate> candidates; // chunk_id -> provenance
    for (const auto& entry : ranking.entries) {
        if (entry.dynamic_score < config.community_gate) continue;
        const graph::Community* community = index.communities.find(entry.community_id);
        if (!community) continue;
        for (const auto& key : community->members) {
            const graph::Node* node = index.graph.find(key);
            if (!node) continue;
            for (const auto& chunk_id : node->source_chunks) {
                if (!is_reference_chunk(chunk_id)) continue;
                auto& candidate = candidates[chunk_id];
                candidate.entity_keys.insert(key.str());
                if (candidate.community_id.empty()) {
                    candidate.community_id = entry.community_id;
                }
            }
        }
    }
    if (candidates.empty()) return result;

    // Score candidates against the requirement embedding.
    std::vector<std::string> texts;
    std::vector<std::string> chunk_ids;
    texts.push_back(requirement_text);
    for (const auto& [chunk_id, candidate] : candidates) {
        chunk_ids.push_back(chunk_id);
        texts.push_back(chunk_by_id.at(chunk_id)->text);
    }
    auto vectors = gateway.embed(texts, "query-graph");

    for (std::size_t i = 0; i < chunk_ids.size(); ++i) {
        double similarity = cosine_similarity(vectors.front(), vectors[i + 1]);
        if (similarity < threshold) continue;
        const auto& candidate = candidates.at(chunk_ids[i]);
        RetrievalItem item;
        item.text = chunk_by_id.at(chunk_ids[i])->text;
        item.similarity = similarity;
        item.provenance.entity_keys = candidate.entity_keys;
        item.provenance.community_id = candidate.community_id;
        item.provenance.chunk_ids = {chunk_ids[i]};
        result.items.push_back(std::move(item));
    }

    std::sort(result.items.begin(), result.items.end(),
              [](const RetrievalItem& a, const RetrievalItem& b) {
                  if (a.similarity != b.similarity) return a.similarity > b.similarity;
                  return *a.provenance.chunk_ids.begin() < *b.provenance.chunk_ids.begin();
              });
    return result;
}

} // namespace reqcheck::retrieval
