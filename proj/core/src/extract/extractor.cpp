#include "reqcheck/extract/extractor.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"
#include "reqcheck/corpus/tokenizer.hpp"
#include "reqcheck/prompts/registry.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace reqcheck::extract {

namespace {

std::string join_types(const std::vector<std::string>& types) {
    return strings::join(types, ", ");
}

std::string entity_dedup_key(const EntityRecord& e) {
    return e.name + "\x1f" + e.entity_type + "\x1f" + e.description;
}

std::string relation_dedup_key(const RelationRecord& r) {
    std::ostringstream key;
    key << r.source << "\x1f" << r.target << "\x1f" << r.description << "\x1f" << r.strength;
    return key.str();
}

llm::ChatRequest make_request(const ExtractionConfig& config, llm::Gateway& gateway,
                              std::string prompt, const char* tag) {
    llm::ChatRequest request;
    request.model_name = config.chat_model.empty() ? gateway.config().chat_model
                                                   : config.chat_model;
    request.messages.push_back({llm::Role::User, std::move(prompt)});
    request.max_tokens = 4096;
    request.request_tag = tag;
    return request;
}

// Parse with one repair attempt: when an output yields only malformed
// records, the model is re-prompted with the offending output and the format
// reminder. All-malformed output after repair is a protocol error.
ParseResult parse_with_repair(const std::string& output, const ExtractionConfig& config,
                              llm::Gateway& gateway) {
    ParseResult parsed = parse_extraction_output(output, config.entity_types);
    bool all_malformed = parsed.record_count > 0 && parsed.malformed_count == parsed.record_count;
    if (!all_malformed) return parsed;

    std::string repair_prompt = prompts::render_named(
        "extraction_repair",
        {{"previous_output", output}, {"entity_types", join_types(config.entity_types)}});
    auto repaired = gateway.chat(make_request(config, gateway, repair_prompt, "extract-repair"));
    ParseResult reparsed = parse_extraction_output(repaired.text, config.entity_types);
    if (reparsed.record_count > 0 && reparsed.malformed_count == reparsed.record_count) {
        throw Error(ErrorCode::LlmProtocolError,
                    "extraction output unparseable after repair attempt");
    }
    reparsed.malformed_count += parsed.malformed_count;
    return reparsed;
}

} // namespace

ExtractionOutcome extract_elements(const corpus::Chunk& chunk, const ExtractionConfig& config,
                                   llm::Gateway& gateway) {
    if (chunk.text.empty()) {
        throw Error(ErrorCode::ConfigError, "extract_elements requires non-empty chunk text");
    }
    if (config.entity_types.empty()) {
        throw Error(ErrorCode::ConfigError, "entity type list must not be empty");
    }

    ExtractionOutcome outcome;
    std::set<std::string> seen_entities;
    std::set<std::string> seen_relations;

    auto absorb = [&](const ParseResult& parsed) {
        outcome.malformed_count += parsed.malformed_count;
        for (auto entity : parsed.entities) {
            entity.source_chunks = {chunk.chunk_id};
            if (seen_entities.insert(entity_dedup_key(entity)).second) {
                outcome.entities.push_back(std::move(entity));
            }
        }
        for (auto relation : parsed.relations) {
            relation.source_chunks = {chunk.chunk_id};
            if (seen_relations.insert(relation_dedup_key(relation)).second) {
                outcome.relations.push_back(std::move(relation));
            }
        }
    };

    std::string few_shot = config.few_shot_examples.empty()
                               ? "(no examples provided)"
                               : strings::join(config.few_shot_examples, "\n\n");

    std::string base_prompt =
        prompts::render_named("extraction", {{"entity_types", join_types(config.entity_types)},
                                             {"few_shot", few_shot},
                                             {"input_text", chunk.text}});
    auto base = gateway.chat(make_request(config, gateway, base_prompt, "extract"));
    absorb(parse_with_repair(base.text, config, gateway));
    outcome.rounds = 1;

    for (std::size_t round = 0; round < config.max_gleanings; ++round) {
        std::string gleaning_prompt = prompts::render_named(
            "extraction_gleaning",
            {{"previous_records", serialize_records(outcome.entities, outcome.relations)},
             {"entity_types", join_types(config.entity_types)},
             {"input_text", chunk.text}});
        auto gleaned =
            gateway.chat(make_request(config, gateway, gleaning_prompt, "extract-gleaning"));
        absorb(parse_with_repair(gleaned.text, config, gateway));
        ++outcome.rounds;
    }
    return outcome;
}

std::vector<EntityRecord> merge_entities(const std::vector<EntityRecord>& records,
                                         const std::map<std::string, std::size_t>& chunk_order) {
    using OrderKey = std::pair<std::size_t, std::string>;
    auto record_order = [&](const EntityRecord& record) -> OrderKey {
        OrderKey best{std::numeric_limits<std::size_t>::max(), ""};
        for (const auto& chunk_id : record.source_chunks) {
            auto it = chunk_order.find(chunk_id);
            OrderKey key{it == chunk_order.end() ? std::numeric_limits<std::size_t>::max()
                                                 : it->second,
                         chunk_id};
            best = std::min(best, key);
        }
        return best;
    };

    struct Merged {
        EntityRecord entity;
        std::vector<std::pair<OrderKey, std::string>> descriptions;
        std::set<std::string> seen_descriptions;
    };

    std::map<std::pair<std::string, std::string>, Merged> by_key;
    for (const auto& record : records) {
        auto key = std::make_pair(strings::to_upper(record.name),
                                  strings::to_lower(record.entity_type));
        auto& merged = by_key[key];
        merged.entity.name = key.first;
        merged.entity.entity_type = key.second;
        merged.entity.source_chunks.insert(record.source_chunks.begin(),
                                           record.source_chunks.end());
        // A previously merged record may carry several newline-joined
        // descriptions; re-split so merge stays idempotent.
        OrderKey order = record_order(record);
        std::istringstream parts(record.description);
        std::string part;
        while (std::getline(parts, part)) {
            if (part.empty()) continue;
            if (merged.seen_descriptions.insert(part).second) {
                merged.descriptions.emplace_back(order, part);
            }
        }
    }

    std::vector<EntityRecord> out;
    out.reserve(by_key.size());
    for (auto& [key, merged] : by_key) {
        std::stable_sort(merged.descriptions.begin(), merged.descriptions.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::string> texts;
        texts.reserve(merged.descriptions.size());
        for (auto& [order, text] : merged.descriptions) texts.push_back(text);
        merged.entity.description = strings::join(texts, "\n");
        out.push_back(std::move(merged.entity));
    }
    return out;
}

std::vector<RelationRecord> merge_relations(const std::vector<RelationRecord>& records) {
    std::map<std::string, RelationRecord> by_key;
    for (const auto& record : records) {
        auto [it, inserted] = by_key.emplace(relation_dedup_key(record), record);
        if (!inserted) {
            it->second.source_chunks.insert(record.source_chunks.begin(),
                                            record.source_chunks.end());
        }
    }
    std::vector<RelationRecord> out;
    out.reserve(by_key.size());
    for (auto& [key, record] : by_key) out.push_back(std::move(record));
    return out;
}

std::string summarize_element(const std::string& element_name,
                              const std::vector<std::string>& descriptions,
                              const ExtractionConfig& config, llm::Gateway& gateway) {
    if (descriptions.empty()) {
        throw Error(ErrorCode::ConfigError,
                    "summarize_element requires at least one description");
    }

    auto truncate_to_budget = [&](const std::string& text) {
        auto spans = corpus::tokenize_spans(text);
        if (spans.size() <= config.summary_token_budget) return text;
        return text.substr(0, spans[config.summary_token_budget - 1].end);
    };

    if (descriptions.size() == 1) {
        return truncate_to_budget(descriptions.front());
    }

    std::ostringstream numbered;
    for (std::size_t i = 0; i < descriptions.size(); ++i) {
        numbered << (i + 1) << ". " << descriptions[i] << "\n";
    }
    std::string prompt = prompts::render_named(
        "element_summary", {{"element_name", element_name},
                            {"budget", std::to_string(config.summary_token_budget)},
                            {"descriptions", numbered.str()}});
    auto response = gateway.chat(make_request(config, gateway, prompt, "summarize-element"));
    std::string summary = strings::trim(response.text);
    if (summary.empty()) {
        throw Error(ErrorCode::LlmProtocolError, "empty element summary for " + element_name);
    }
    return truncate_to_budget(summary);
}

} // namespace reqcheck::extract
