#include "reqcheck/retrieval/dense_index.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/retrieval/similarity.hpp"

#include <algorithm>

namespace reqcheck::retrieval {

DenseIndex baseline_build(const std::vector<std::pair<std::string, std::string>>& id_texts,
                          llm::Gateway& gateway) {
    DenseIndex index;
    if (id_texts.empty()) return index;

    std::vector<std::string> texts;
    texts.reserve(id_texts.size());
    for (const auto& [id, text] : id_texts) texts.push_back(text);

    auto vectors = gateway.embed(texts, "baseline-build");
    index.dimension = vectors.front().dimension();
    index.entries.reserve(id_texts.size());
    for (std::size_t i = 0; i < id_texts.size(); ++i) {
        index.entries.push_back({id_texts[i].first, id_texts[i].second, std::move(vectors[i])});
    }
    return index;
}

std::vector<ScoredEntry> baseline_retrieve(const DenseIndex& index, const std::string& query,
                                           std::size_t k, llm::Gateway& gateway) {
    if (index.entries.empty()) {
        throw Error(ErrorCode::EmptyIndex, "baseline index has no entries");
    }
    if (k == 0) {
        throw Error(ErrorCode::ConfigError, "k must be >= 1");
    }

    auto query_vec = gateway.embed({query}, "baseline-query").front();

    struct Scored {
        std::size_t ordinal;
        double similarity;
    };
    std::vector<Scored> scored;
    scored.reserve(index.entries.size());
    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        scored.push_back({i, cosine_similarity(query_vec, index.entries[i].embedding)});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.ordinal < b.ordinal;
    });

    std::vector<ScoredEntry> out;
    const std::size_t take = std::min(k, scored.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const auto& entry = index.entries[scored[i].ordinal];
        out.push_back({entry.ref_id, entry.text, scored[i].similarity});
    }
    return out;
}

} // namespace reqcheck::retrieval
