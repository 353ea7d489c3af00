// Microbenchmarks for the hot paths: chunking, cleaning, extraction parsing,
// cosine scans and community detection.

#include "reqcheck/corpus/chunker.hpp"
#include "reqcheck/corpus/clean.hpp"
#include "reqcheck/corpus/tokenizer.hpp"
#include "reqcheck/extract/records.hpp"
#include "reqcheck/graph/community.hpp"
#include "reqcheck/retrieval/similarity.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

namespace {

using namespace reqcheck;

std::string synthetic_prose(std::size_t words, std::uint64_t seed = 1) {
    static const char* vocabulary[] = {
        "platform", "shall",   "synchronize", "watchdog", "timer",   "lane",
        "voting",   "message", "exchange",    "fault",    "report",  "cadence",
        "the",      "of",      "a",           "redundant", "within", "seconds",
    };
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(vocabulary) - 1);
    std::ostringstream out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i > 0) out << (i % 13 == 0 ? "\n" : " ");
        out << vocabulary[pick(rng)];
    }
    return out.str();
}

void BM_Tokenize(benchmark::State& state) {
    auto text = synthetic_prose(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(corpus::tokenize_spans(text));
    }
    state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_Tokenize)->Arg(1000)->Arg(10000);

void BM_CleanText(benchmark::State& state) {
    auto text = synthetic_prose(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(corpus::clean_text(text, corpus::default_clean_passes()));
    }
    state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_CleanText)->Arg(1000)->Arg(10000);

void BM_Chunk(benchmark::State& state) {
    corpus::Document doc;
    doc.doc_id = "bench";
    doc.body = synthetic_prose(static_cast<std::size_t>(state.range(0)));
    corpus::ChunkConfig config{600, 100};
    for (auto _ : state) {
        benchmark::DoNotOptimize(corpus::chunk(doc, config));
    }
}
BENCHMARK(BM_Chunk)->Arg(5000)->Arg(50000);

void BM_ParseExtraction(benchmark::State& state) {
    std::vector<extract::EntityRecord> entities;
    std::vector<extract::RelationRecord> relations;
    for (int i = 0; i < state.range(0); ++i) {
        extract::EntityRecord entity;
        entity.name = "CLAUSE " + std::to_string(i);
        entity.entity_type = "article";
        entity.description = "provision " + std::to_string(i) + " of the standard";
        entities.push_back(entity);
        if (i > 0) {
            extract::RelationRecord relation;
            relation.source = "CLAUSE " + std::to_string(i - 1);
            relation.target = "CLAUSE " + std::to_string(i);
            relation.description = "adjacent provisions";
            relation.strength = 5.0;
            relations.push_back(relation);
        }
    }
    auto wire = extract::serialize_records(entities, relations);
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract::parse_extraction_output(wire));
    }
    state.SetBytesProcessed(state.iterations() * wire.size());
}
BENCHMARK(BM_ParseExtraction)->Arg(16)->Arg(256);

void BM_CosineScan(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    const std::size_t dim = 256;
    const std::size_t entries = static_cast<std::size_t>(state.range(0));
    llm::EmbeddingVector query;
    for (std::size_t d = 0; d < dim; ++d) query.values.push_back(coord(rng));
    std::vector<llm::EmbeddingVector> corpus_vectors(entries);
    for (auto& vec : corpus_vectors) {
        for (std::size_t d = 0; d < dim; ++d) vec.values.push_back(coord(rng));
    }
    for (auto _ : state) {
        double best = -2.0;
        for (const auto& vec : corpus_vectors) {
            best = std::max(best, retrieval::cosine_similarity(query, vec));
        }
        benchmark::DoNotOptimize(best);
    }
    state.SetItemsProcessed(state.iterations() * entries);
}
BENCHMARK(BM_CosineScan)->Arg(1000)->Arg(10000);

void BM_CommunityDetection(benchmark::State& state) {
    std::mt19937_64 rng(9);
    const int n = static_cast<int>(state.range(0));
    std::vector<extract::EntityRecord> entities;
    std::vector<extract::RelationRecord> relations;
    for (int i = 0; i < n; ++i) {
        extract::EntityRecord entity;
        entity.name = "N" + std::to_string(i);
        entity.entity_type = "article";
        entity.description = "node";
        entities.push_back(entity);
    }
    // Planted partition: dense blocks of 8 with sparse cross links.
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool same_block = i / 8 == j / 8;
            if (coin(rng) < (same_block ? 0.7 : 0.02)) {
                extract::RelationRecord relation;
                relation.source = "N" + std::to_string(i);
                relation.target = "N" + std::to_string(j);
                relation.description = "link";
                relation.strength = 1.0;
                relations.push_back(relation);
            }
        }
    }
    auto graph = graph::build_graph(entities, relations);
    for (auto _ : state) {
        benchmark::DoNotOptimize(graph::detect_communities(graph, 1.0, 3, 0));
    }
}
BENCHMARK(BM_CommunityDetection)->Arg(32)->Arg(96);

} // namespace

BENCHMARK_MAIN();
