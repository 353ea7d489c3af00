#include "reqcheck/pipeline/run_config.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/llm/openai_provider.hpp"
#include "reqcheck/llm/scripted_provider.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>

namespace reqcheck::pipeline {

using nlohmann::json;

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
    }
    json parsed;
    try {
        in >> parsed;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }

    static const std::set<std::string> known = {
        "corpus_paths",        "requirements_path",    "ground_truth_path",
        "chunk_size_tokens",   "overlap_tokens",       "entity_types",
        "glossary_entity_type", "max_gleanings",       "community_resolution",
        "max_community_levels", "community_token_budget", "summary_token_budget",
        "similarity_threshold", "community_gate",      "baseline_top_k",
        "retrieval_modes",     "strategies",           "tot_single_call",
        "gateway_mode",        "provider",             "chat_model",
        "embedding_model",     "api_base_url",         "max_concurrency",
        "cache_path",          "output_dir",           "seed",
    };
    for (const auto& [key, value] : parsed.items()) {
        if (!known.count(key)) {
            throw Error(ErrorCode::ConfigError, path.string() + ": unknown key '" + key + "'");
        }
    }

    RunConfig config;
    auto get = [&](const char* key, auto& field) {
        if (parsed.contains(key)) field = parsed[key].get<std::decay_t<decltype(field)>>();
    };
    get("corpus_paths", config.corpus_paths);
    get("requirements_path", config.requirements_path);
    get("ground_truth_path", config.ground_truth_path);
    get("chunk_size_tokens", config.chunk_size_tokens);
    get("overlap_tokens", config.overlap_tokens);
    get("entity_types", config.entity_types);
    get("glossary_entity_type", config.glossary_entity_type);
    get("max_gleanings", config.max_gleanings);
    get("community_resolution", config.community_resolution);
    get("max_community_levels", config.max_community_levels);
    get("community_token_budget", config.community_token_budget);
    get("summary_token_budget", config.summary_token_budget);
    get("similarity_threshold", config.similarity_threshold);
    get("community_gate", config.community_gate);
    get("baseline_top_k", config.baseline_top_k);
    get("retrieval_modes", config.retrieval_modes);
    get("strategies", config.strategies);
    get("tot_single_call", config.tot_single_call);
    get("gateway_mode", config.gateway_mode);
    get("provider", config.provider);
    get("chat_model", config.chat_model);
    get("embedding_model", config.embedding_model);
    get("api_base_url", config.api_base_url);
    get("max_concurrency", config.max_concurrency);
    get("cache_path", config.cache_path);
    get("output_dir", config.output_dir);
    get("seed", config.seed);
    return config;
}

void validate(const RunConfig& config) {
    if (config.similarity_threshold < 0.0 || config.similarity_threshold > 1.0) {
        throw Error(ErrorCode::ConfigError, "similarity_threshold must be in [0,1]");
    }
    if (config.chunk_size_tokens == 0 || config.overlap_tokens >= config.chunk_size_tokens) {
        throw Error(ErrorCode::ConfigError, "overlap_tokens must be < chunk_size_tokens");
    }
    if (config.entity_types.empty()) {
        throw Error(ErrorCode::ConfigError, "entity_types must not be empty");
    }
    for (const auto& mode : config.retrieval_modes) {
        if (mode != "graph" && mode != "baseline") {
            throw Error(ErrorCode::ConfigError, "unknown retrieval mode: " + mode);
        }
    }
    for (const auto& strategy : config.strategies) {
        if (strategy != "io" && strategy != "cot" && strategy != "tot") {
            throw Error(ErrorCode::ConfigError, "unknown strategy: " + strategy);
        }
    }
    if (config.provider != "openai" && config.provider != "scripted") {
        throw Error(ErrorCode::ConfigError, "unknown provider: " + config.provider);
    }
    llm::gateway_mode_from_string(config.gateway_mode); // throws on bad value
    if (config.baseline_top_k == 0) {
        throw Error(ErrorCode::ConfigError, "baseline_top_k must be >= 1");
    }
}

llm::GatewayPtr make_gateway(const RunConfig& config) {
    llm::GatewayConfig gateway_config;
    gateway_config.mode = llm::gateway_mode_from_string(config.gateway_mode);
    gateway_config.chat_model = config.chat_model;
    gateway_config.embedding_model = config.embedding_model;
    gateway_config.max_concurrency = config.max_concurrency;
    gateway_config.cache_path =
        config.cache_path.empty()
            ? (std::filesystem::path(config.output_dir) / "replay_cache.jsonl").string()
            : config.cache_path;

    llm::ProviderPtr provider;
    if (gateway_config.mode != llm::GatewayMode::Replay) {
        if (config.provider == "scripted") {
            provider = std::make_shared<llm::ScriptedProvider>();
        } else {
            llm::OpenAiConfig openai;
            openai.base_url = config.api_base_url;
            if (const char* key = std::getenv("REQCHECK_API_KEY")) {
                openai.api_key = key;
            } else if (const char* fallback = std::getenv("OPENAI_API_KEY")) {
                openai.api_key = fallback;
            }
            provider = std::make_shared<llm::OpenAiProvider>(openai);
        }
    }
    return std::make_shared<llm::Gateway>(gateway_config, provider);
}

std::filesystem::path graph_dump_path(const RunConfig& config) {
    return std::filesystem::path(config.output_dir) / "graph.json";
}

} // namespace reqcheck::pipeline
