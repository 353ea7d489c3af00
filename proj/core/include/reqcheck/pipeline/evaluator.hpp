#pragma once

#include "reqcheck/corpus/types.hpp"
#include "reqcheck/eval/report.hpp"
#include "reqcheck/graph/persist.hpp"
#include "reqcheck/pipeline/run_config.hpp"
#include "reqcheck/reason/protocols.hpp"
#include "reqcheck/retrieval/graph_search.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reqcheck::pipeline {

struct VerdictRecord {
    std::string req_id;
    std::string mode;
    std::string strategy;
    Label label = Label::Irrelevant;
    std::optional<reason::Verdict> verdict;
    std::vector<std::pair<std::string, double>> retrieved; // (ref id, similarity)
};

struct CheckOutput {
    retrieval::RetrievalResult retrieval;
    reason::Classification classification;
};

/// One requirement through retrieval + the chosen strategy, at the
/// configured threshold.
CheckOutput check_requirement(const RunConfig& config, const graph::GraphIndex& index,
                              llm::Gateway& gateway, const corpus::Requirement& requirement,
                              reason::Strategy strategy, const std::string& mode = "graph");

struct EvaluationOutputs {
    // mode -> strategy -> per-requirement records (requirement file order)
    std::map<std::string, std::map<std::string, std::vector<VerdictRecord>>> cells;
    eval::ReportInput report;
    std::string coverage_csv;
    nlohmann::ordered_json manifest;
    std::vector<std::string> errors; // failed cells, if any
};

/// Runs every configured (retrieval mode x strategy) cell over the
/// requirement set, computes confusion matrices and the coverage sweep, and
/// assembles report inputs. Cell failures are recorded and other cells still
/// run (partial-results manifest).
EvaluationOutputs evaluate(const RunConfig& config, const graph::GraphIndex& index,
                           llm::Gateway& gateway, const std::function<bool()>& interrupted = {});

/// Writes report.md, report.json, coverage.csv, verdicts_<mode>_<strategy>.jsonl
/// and evaluate_manifest.json under the output directory.
void write_evaluation_outputs(const EvaluationOutputs& outputs, const RunConfig& config);

std::string verdicts_to_jsonl(const std::vector<VerdictRecord>& records);

} // namespace reqcheck::pipeline
