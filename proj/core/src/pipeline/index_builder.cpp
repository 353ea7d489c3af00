#include "reqcheck/pipeline/index_builder.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"
#include "reqcheck/corpus/chunker.hpp"
#include "reqcheck/corpus/clean.hpp"
#include "reqcheck/corpus/glossary.hpp"
#include "reqcheck/corpus/ingest.hpp"
#include "reqcheck/corpus/tokenizer.hpp"
#include "reqcheck/extract/extractor.hpp"
#include "reqcheck/prompts/registry.hpp"

#include <algorithm>
#include <set>
#include <fstream>

namespace reqcheck::pipeline {

using nlohmann::ordered_json;

namespace {

void check_interrupt(const std::function<bool()>& interrupted, const char* stage) {
    if (interrupted && interrupted()) {
        throw Error(ErrorCode::IoError, std::string("interrupted during ") + stage);
    }
}

std::vector<std::filesystem::path> collect_corpus_files(const RunConfig& config) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : config.corpus_paths) {
        std::filesystem::path path(entry);
        if (std::filesystem::is_directory(path)) {
            std::vector<std::filesystem::path> inside;
            for (const auto& file : std::filesystem::directory_iterator(path)) {
                if (!file.is_regular_file()) continue;
                auto ext = file.path().extension().string();
                if (ext == ".txt" || ext == ".md") inside.push_back(file.path());
            }
            std::sort(inside.begin(), inside.end());
            files.insert(files.end(), inside.begin(), inside.end());
        } else if (std::filesystem::is_regular_file(path)) {
            files.push_back(path);
        } else {
            throw Error(ErrorCode::ConfigError, "corpus path not found: " + entry);
        }
    }
    if (files.empty()) {
        throw Error(ErrorCode::ConfigError, "no corpus files found");
    }
    return files;
}

} // namespace

BuildResult build_index(const RunConfig& config, llm::Gateway& gateway,
                        const std::function<bool()>& interrupted) {
    validate(config);

    BuildResult result;
    std::vector<std::string> warnings;

    // Ingest and clean the reference corpus.
    std::vector<corpus::Document> documents;
    std::set<std::string> doc_ids;
    for (const auto& path : collect_corpus_files(config)) {
        check_interrupt(interrupted, "ingest");
        auto document = corpus::ingest(path, corpus::DocumentKind::Reference, &warnings);
        if (!doc_ids.insert(document.doc_id).second) {
            throw Error(ErrorCode::ConfigError,
                        "duplicate document id in corpus: " + document.doc_id);
        }
        document.body = corpus::clean_text(document.body, corpus::default_clean_passes());
        if (document.body.empty()) {
            warnings.push_back("document emptied by cleaning: " + document.doc_id);
            continue;
        }
        documents.push_back(std::move(document));
    }

    // Glossary, chunks, chunk-order map.
    std::vector<corpus::GlossaryEntry> glossary;
    std::vector<corpus::Chunk> chunks;
    std::map<std::string, std::size_t> chunk_order;
    corpus::ChunkConfig chunk_config{config.chunk_size_tokens, config.overlap_tokens};
    for (const auto& document : documents) {
        auto entries = corpus::extract_glossary(document);
        glossary.insert(glossary.end(), entries.begin(), entries.end());
        for (auto& chunk : corpus::chunk(document, chunk_config)) {
            chunk_order[chunk.chunk_id] = chunk_order.size();
            chunks.push_back(std::move(chunk));
        }
    }

    // Extraction across chunks, plus glossary terms pre-seeded as entities.
    extract::ExtractionConfig extraction_config;
    extraction_config.entity_types = config.entity_types;
    extraction_config.max_gleanings = config.max_gleanings;
    extraction_config.summary_token_budget = config.summary_token_budget;
    extraction_config.chat_model = config.chat_model;

    std::vector<extract::EntityRecord> entities;
    std::vector<extract::RelationRecord> relations;
    std::size_t malformed_records = 0;

    for (const auto& entry : glossary) {
        extract::EntityRecord seeded;
        seeded.name = strings::to_upper(entry.term);
        seeded.entity_type = config.glossary_entity_type;
        seeded.description = entry.definition;
        for (const auto& chunk : chunks) {
            if (chunk.text.find(entry.term) != std::string::npos) {
                seeded.source_chunks.insert(chunk.chunk_id);
            }
        }
        if (seeded.source_chunks.empty()) {
            warnings.push_back("glossary term not found in any chunk: " + entry.term);
            continue;
        }
        entities.push_back(std::move(seeded));
    }

    for (const auto& chunk : chunks) {
        check_interrupt(interrupted, "extraction");
        auto outcome = extract::extract_elements(chunk, extraction_config, gateway);
        malformed_records += outcome.malformed_count;
        entities.insert(entities.end(), outcome.entities.begin(), outcome.entities.end());
        relations.insert(relations.end(), outcome.relations.begin(), outcome.relations.end());
    }

    const std::size_t raw_entities = entities.size();
    auto merged_entities = extract::merge_entities(entities, chunk_order);
    auto merged_relations = extract::merge_relations(relations);

    // Abstractive consolidation of multi-description entities.
    std::size_t summarized_elements = 0;
    for (auto& entity : merged_entities) {
        check_interrupt(interrupted, "element summarization");
        auto lines = strings::split_lines(entity.description);
        std::vector<std::string> descriptions;
        for (auto& line : lines) {
            if (!strings::trim(line).empty()) descriptions.push_back(line);
        }
        if (descriptions.size() <= 1) continue;
        entity.description = extract::summarize_element(entity.name, descriptions,
                                                        extraction_config, gateway);
        ++summarized_elements;
    }

    result.extraction_jsonl = extract::records_to_jsonl(merged_entities, merged_relations);
    result.index.graph = graph::build_graph(merged_entities, merged_relations);
    result.index.communities = graph::detect_communities(
        result.index.graph, config.community_resolution, config.max_community_levels,
        config.seed);

    // Community reports, finest level first so parents can pack child
    // summaries.
    std::size_t severity_clamps = 0;
    if (result.index.communities.level_count() > 0) {
        for (std::size_t level = result.index.communities.level_count(); level-- > 0;) {
            for (const auto* community : result.index.communities.at_level(level)) {
                check_interrupt(interrupted, "community summarization");
                std::map<std::string, graph::CommunityReport> child_reports;
                for (const auto* child :
                     result.index.communities.children_of(community->community_id)) {
                    auto it = result.index.reports.find(child->community_id);
                    if (it != result.index.reports.end()) {
                        child_reports.emplace(it->first, it->second);
                    }
                }
                auto outcome = graph::summarize_community(result.index.graph, *community,
                                                          child_reports,
                                                          config.community_token_budget,
                                                          gateway);
                for (const auto& warning : outcome.warnings) {
                    if (warning.find("clamped") != std::string::npos) ++severity_clamps;
                    warnings.push_back(community->community_id + ": " + warning);
                }
                result.index.reports[community->community_id] = std::move(outcome.report);
            }
        }
    }

    result.index.chunks = std::move(chunks);
    for (const auto& document : documents) {
        result.index.document_kinds[document.doc_id] = document.kind;
    }
    result.index.glossary = std::move(glossary);
    result.index.tokenizer_version = corpus::tokenizer_version();

    // Manifest: deterministic counts only, no timestamps or absolute paths.
    ordered_json counts;
    counts["documents"] = documents.size();
    counts["chunks"] = result.index.chunks.size();
    counts["glossary_entries"] = result.index.glossary.size();
    counts["entities_raw"] = raw_entities;
    counts["entities_merged"] = merged_entities.size();
    counts["relations"] = merged_relations.size();
    counts["edges"] = result.index.graph.edges().size();
    counts["nodes"] = result.index.graph.nodes().size();
    counts["dangling_relations_dropped"] = result.index.graph.stats().dangling_dropped;
    counts["self_loops_dropped"] = result.index.graph.stats().self_loops_dropped;
    counts["malformed_records"] = malformed_records;
    counts["summarized_elements"] = summarized_elements;
    counts["community_levels"] = result.index.communities.level_count();
    counts["communities"] = result.index.communities.all().size();
    counts["reports"] = result.index.reports.size();
    counts["severity_clamps"] = severity_clamps;

    ordered_json cost = ordered_json::object();
    auto report = gateway.cost_report();
    for (const auto& [tag, bucket] : report.by_tag) {
        cost[tag] = {{"live_calls", bucket.live_calls},
                     {"replay_hits", bucket.replay_hits},
                     {"prompt_tokens", bucket.prompt_tokens},
                     {"completion_tokens", bucket.completion_tokens}};
    }
    cost["total"] = {{"live_calls", report.total.live_calls},
                     {"replay_hits", report.total.replay_hits},
                     {"prompt_tokens", report.total.prompt_tokens},
                     {"completion_tokens", report.total.completion_tokens}};

    std::sort(warnings.begin(), warnings.end());

    result.manifest["schema_version"] = graph::kGraphSchemaVersion;
    result.manifest["tokenizer_version"] = corpus::tokenizer_version();
    result.manifest["prompts_version"] = prompts::prompts_version();
    result.manifest["seed"] = config.seed;
    result.manifest["chunk_size_tokens"] = config.chunk_size_tokens;
    result.manifest["overlap_tokens"] = config.overlap_tokens;
    result.manifest["entity_types"] = config.entity_types;
    result.manifest["max_gleanings"] = config.max_gleanings;
    result.manifest["community_resolution"] = config.community_resolution;
    result.manifest["counts"] = std::move(counts);
    result.manifest["warnings"] = warnings;
    result.manifest["cost"] = std::move(cost);
    return result;
}

void write_build_outputs(const BuildResult& result, const RunConfig& config) {
    std::filesystem::path out_dir(config.output_dir);
    std::filesystem::create_directories(out_dir);

    graph::persist_graph(result.index, graph_dump_path(config));

    std::ofstream manifest(out_dir / "build_manifest.json", std::ios::trunc);
    if (!manifest) {
        throw Error(ErrorCode::IoError, "cannot write build manifest");
    }
    manifest << result.manifest.dump(2) << "\n";

    std::ofstream glossary(out_dir / "glossary.json", std::ios::trunc);
    if (!glossary) {
        throw Error(ErrorCode::IoError, "cannot write glossary.json");
    }
    glossary << corpus::glossary_to_json(result.index.glossary);

    std::ofstream records(out_dir / "extraction_records.jsonl", std::ios::trunc);
    if (!records) {
        throw Error(ErrorCode::IoError, "cannot write extraction_records.jsonl");
    }
    records << result.extraction_jsonl;
}

} // namespace reqcheck::pipeline
