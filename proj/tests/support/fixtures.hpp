#pragma once

// Shared helpers for building tiny graphs, gateways and throwaway dirs.

#include "reqcheck/extract/records.hpp"
#include "reqcheck/graph/knowledge_graph.hpp"
#include "reqcheck/llm/gateway.hpp"
#include "reqcheck/llm/scripted_provider.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace test_fixtures {

inline std::filesystem::path fresh_dir(const std::string& stem) {
    static std::atomic<unsigned> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("reqcheck_test_" + stem + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline reqcheck::llm::GatewayPtr scripted_gateway(const std::filesystem::path& cache,
                                                  reqcheck::llm::GatewayMode mode =
                                                      reqcheck::llm::GatewayMode::Record) {
    reqcheck::llm::GatewayConfig config;
    config.mode = mode;
    config.cache_path = cache.string();
    config.chat_model = "scripted-chat";
    config.embedding_model = "scripted-embed";
    config.retry.base_delay_ms = 1;
    auto provider = mode == reqcheck::llm::GatewayMode::Replay
                        ? nullptr
                        : std::make_shared<reqcheck::llm::ScriptedProvider>();
    return std::make_shared<reqcheck::llm::Gateway>(config, provider);
}

inline reqcheck::extract::EntityRecord entity(const std::string& name,
                                              const std::string& type = "article",
                                              const std::string& description = "",
                                              const std::string& chunk = "doc#000000") {
    reqcheck::extract::EntityRecord record;
    record.name = name;
    record.entity_type = type;
    record.description = description.empty() ? ("Entity " + name) : description;
    record.source_chunks = {chunk};
    return record;
}

inline reqcheck::extract::RelationRecord relation(const std::string& source,
                                                  const std::string& target,
                                                  double strength = 1.0,
                                                  const std::string& description = "related") {
    reqcheck::extract::RelationRecord record;
    record.source = source;
    record.target = target;
    record.description = description;
    record.strength = strength;
    record.source_chunks = {"doc#000000"};
    return record;
}

// Two triangles {A,B,C} and {D,E,F} joined by one bridge C-D, all weights 1.
inline reqcheck::graph::KnowledgeGraph two_triangles_bridge() {
    std::vector<reqcheck::extract::EntityRecord> entities;
    for (const char* name : {"A", "B", "C", "D", "E", "F"}) entities.push_back(entity(name));
    std::vector<reqcheck::extract::RelationRecord> relations = {
        relation("A", "B"), relation("B", "C"), relation("A", "C"),
        relation("D", "E"), relation("E", "F"), relation("D", "F"),
        relation("C", "D"),
    };
    return reqcheck::graph::build_graph(entities, relations);
}

inline reqcheck::graph::KnowledgeGraph complete_k4() {
    std::vector<reqcheck::extract::EntityRecord> entities;
    for (const char* name : {"A", "B", "C", "D"}) entities.push_back(entity(name));
    std::vector<reqcheck::extract::RelationRecord> relations;
    const char* names[] = {"A", "B", "C", "D"};
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) relations.push_back(relation(names[i], names[j]));
    }
    return reqcheck::graph::build_graph(entities, relations);
}

inline reqcheck::graph::KnowledgeGraph isolated_nodes(int count) {
    std::vector<reqcheck::extract::EntityRecord> entities;
    for (int i = 0; i < count; ++i) entities.push_back(entity("N" + std::to_string(i)));
    return reqcheck::graph::build_graph(entities, {});
}

// Random connected-ish weighted graph with <= max_nodes nodes.
inline reqcheck::graph::KnowledgeGraph random_graph(std::mt19937_64& rng, int max_nodes) {
    std::uniform_int_distribution<int> node_count(2, max_nodes);
    const int n = node_count(rng);
    std::vector<reqcheck::extract::EntityRecord> entities;
    for (int i = 0; i < n; ++i) entities.push_back(entity("R" + std::to_string(i)));

    std::vector<reqcheck::extract::RelationRecord> relations;
    std::uniform_real_distribution<double> strength(1.0, 10.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng) < 0.45) {
                relations.push_back(relation("R" + std::to_string(i), "R" + std::to_string(j),
                                             strength(rng)));
            }
        }
    }
    return reqcheck::graph::build_graph(entities, relations);
}

} // namespace test_fixtures
