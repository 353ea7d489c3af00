#pragma once

#include "reqcheck/corpus/types.hpp"
#include "reqcheck/graph/community.hpp"
#include "reqcheck/graph/knowledge_graph.hpp"
#include "reqcheck/graph/report.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace reqcheck::graph {

/// Everything a query needs: the graph, its community structure and reports,
/// and the source chunks (retrieval passages) with their document kinds.
struct GraphIndex {
    KnowledgeGraph graph;
    CommunityHierarchy communities;
    std::map<std::string, CommunityReport> reports; // by community_id
    std::vector<corpus::Chunk> chunks;
    std::map<std::string, corpus::DocumentKind> document_kinds; // by doc_id
    std::vector<corpus::GlossaryEntry> glossary;
    std::string tokenizer_version;
};

inline constexpr int kGraphSchemaVersion = 1;

/// Deterministic JSON dump: two dumps of the same index are byte-identical.
void persist_graph(const GraphIndex& index, const std::filesystem::path& path);

/// Loads a dump written by persist_graph. Throws SchemaVersionMismatch for
/// unknown versions and IoError for unreadable/corrupt files; never returns
/// a partially loaded index.
GraphIndex load_graph(const std::filesystem::path& path);

/// GraphML export for visual inspection of communities and edge weights.
std::string to_graphml(const GraphIndex& index);

} // namespace reqcheck::graph
