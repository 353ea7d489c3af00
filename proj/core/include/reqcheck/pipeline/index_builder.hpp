#pragma once

#include "reqcheck/graph/persist.hpp"
#include "reqcheck/llm/gateway.hpp"
#include "reqcheck/pipeline/run_config.hpp"

#include <nlohmann/json.hpp>

#include <functional>

namespace reqcheck::pipeline {

struct BuildResult {
    graph::GraphIndex index;
    nlohmann::ordered_json manifest; // deterministic counts, warnings, cost
    std::string extraction_jsonl;    // merged records, one JSON object per line
};

/// Full index build: ingest + clean + glossary + chunk + extract (with
/// gleanings) + merge + element summaries + graph + communities + community
/// reports. `interrupted` (optional) is polled between work items so Ctrl-C
/// can stop cleanly with the replay cache already flushed.
BuildResult build_index(const RunConfig& config, llm::Gateway& gateway,
                        const std::function<bool()>& interrupted = {});

/// Writes graph.json, glossary.json and build_manifest.json under the
/// configured output directory.
void write_build_outputs(const BuildResult& result, const RunConfig& config);

} // namespace reqcheck::pipeline
