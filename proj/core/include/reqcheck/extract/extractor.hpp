#pragma once

#include "reqcheck/corpus/types.hpp"
#include "reqcheck/extract/records.hpp"
#include "reqcheck/llm/gateway.hpp"

#include <map>
#include <string>
#include <vector>

namespace reqcheck::extract {

struct ExtractionOutcome {
    std::vector<EntityRecord> entities;
    std::vector<RelationRecord> relations;
    std::size_t malformed_count = 0;
    std::size_t rounds = 0; // base round + gleanings actually run
};

/// LLM extraction over one chunk: a base round plus up to max_gleanings
/// follow-up rounds, each follow-up fed the records found so far. Every
/// record carries the chunk id in source_chunks. One repair re-prompt is
/// attempted when an output parses to nothing but malformed records;
/// LlmProtocolError after that.
ExtractionOutcome extract_elements(const corpus::Chunk& chunk, const ExtractionConfig& config,
                                   llm::Gateway& gateway);

/// Merges entity records by (uppercased name, type): source chunk sets are
/// unioned and distinct descriptions concatenated in chunk order (chunk ids
/// missing from `chunk_order` sort after known ones, by id). Output sorted by
/// key; merge(merge(x)) == merge(x).
std::vector<EntityRecord> merge_entities(const std::vector<EntityRecord>& records,
                                         const std::map<std::string, std::size_t>& chunk_order = {});

/// Deduplicates identical (source, target, description, strength) relations,
/// unioning provenance. Aggregation into weighted edges happens in the graph
/// build, not here.
std::vector<RelationRecord> merge_relations(const std::vector<RelationRecord>& records);

/// Abstractive consolidation of multiple element descriptions. A single
/// description passes through unchanged without an LLM call. Result is
/// truncated to the configured token budget.
std::string summarize_element(const std::string& element_name,
                              const std::vector<std::string>& descriptions,
                              const ExtractionConfig& config, llm::Gateway& gateway);

} // namespace reqcheck::extract
