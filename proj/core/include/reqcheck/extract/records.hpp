#pragma once

#include <set>
#include <string>
#include <vector>

namespace reqcheck::extract {

struct EntityRecord {
    std::string name; // uppercased
    std::string entity_type; // lowercased, one of the configured types
    std::string description;
    std::set<std::string> source_chunks;
};

struct RelationRecord {
    std::string source; // entity name, uppercased
    std::string target;
    std::string description;
    double strength = 1.0; // within [1,10]
    std::set<std::string> source_chunks;
};

struct ExtractionConfig {
    std::vector<std::string> entity_types = {"article", "standard", "requirement"};
    std::size_t max_gleanings = 1;
    std::vector<std::string> few_shot_examples;
    std::size_t summary_token_budget = 400;
    std::string chat_model; // empty -> gateway default
};

struct ParseResult {
    std::vector<EntityRecord> entities;
    std::vector<RelationRecord> relations;
    std::size_t malformed_count = 0;
    std::size_t record_count = 0; // well-formed + malformed
};

/// Record/completion delimiters of the extraction wire format. Prompts show
/// the same strings, so parse and serialize stay in lock step.
inline constexpr const char* kFieldDelimiter = "<|>";
inline constexpr const char* kRecordDelimiter = "##";
inline constexpr const char* kCompletionDelimiter = "<|COMPLETE|>";

/// Parses LLM extraction output: ("entity"<|>name<|>type<|>description) and
/// ("relationship"<|>source<|>target<|>description<|>strength) records,
/// tolerant of surrounding prose; parsing stops at the completion delimiter.
/// Malformed records (wrong arity, unknown type token, self-loop relations)
/// are skipped and counted, never fatal.
ParseResult parse_extraction_output(const std::string& text,
                                    const std::vector<std::string>& entity_types = {
                                        "article", "standard", "requirement"});

/// Inverse of parse_extraction_output for well-formed records (used for
/// gleaning prompts, dumps and round-trip checks).
std::string serialize_records(const std::vector<EntityRecord>& entities,
                              const std::vector<RelationRecord>& relations);

std::string records_to_jsonl(const std::vector<EntityRecord>& entities,
                             const std::vector<RelationRecord>& relations);

} // namespace reqcheck::extract
