#pragma once

#include "reqcheck/llm/gateway.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace reqcheck::pipeline {

/// One declarative bundle of run settings. Precedence: built-in defaults,
/// then the JSON config file, then command-line flags; secrets (API key)
/// come from the environment only.
struct RunConfig {
    std::vector<std::string> corpus_paths; // reference files or directories
    std::string requirements_path;         // JSON-lines, one Requirement per line
    std::string ground_truth_path;         // CSV req_id,reference_passage_id,label

    std::size_t chunk_size_tokens = 600;
    std::size_t overlap_tokens = 100;

    std::vector<std::string> entity_types = {"article", "standard", "requirement"};
    std::string glossary_entity_type = "standard";
    std::size_t max_gleanings = 1;

    double community_resolution = 1.0;
    std::size_t max_community_levels = 3;
    std::size_t community_token_budget = 1200;
    std::size_t summary_token_budget = 400;

    double similarity_threshold = 0.7; // retrieval default
    double community_gate = -1.0;      // sub-community dynamic-score gate
    std::size_t baseline_top_k = 5;

    std::vector<std::string> retrieval_modes = {"graph", "baseline"};
    std::vector<std::string> strategies = {"io", "cot", "tot"};
    bool tot_single_call = false;

    std::string gateway_mode = "replay"; // live | record | replay
    std::string provider = "openai";     // openai | scripted
    std::string chat_model = "gpt-4o";
    std::string embedding_model = "text-embedding-3-small";
    std::string api_base_url = "https://api.openai.com";
    int max_concurrency = 4;
    std::string cache_path; // defaults to <output_dir>/replay_cache.jsonl

    std::string output_dir = "out";
    std::uint64_t seed = 0;
};

/// Reads a JSON config file over the defaults. Unknown keys are rejected.
RunConfig load_config_file(const std::filesystem::path& path);

/// Merges `file` config under explicitly-set flag values happens in the CLI;
/// this validates cross-field consistency and throws ConfigError.
void validate(const RunConfig& config);

/// Builds the gateway for the configured provider/mode. API keys are read
/// from REQCHECK_API_KEY or OPENAI_API_KEY; they never appear in files.
llm::GatewayPtr make_gateway(const RunConfig& config);

/// Path of the persisted graph dump within the output directory.
std::filesystem::path graph_dump_path(const RunConfig& config);

} // namespace reqcheck::pipeline
