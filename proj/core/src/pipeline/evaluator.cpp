#include "reqcheck/pipeline/evaluator.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/corpus/ingest.hpp"
#include "reqcheck/eval/metrics.hpp"
#include "reqcheck/retrieval/coverage.hpp"
#include "reqcheck/retrieval/dense_index.hpp"

#include <algorithm>
#include <fstream>

namespace reqcheck::pipeline {

using nlohmann::ordered_json;

namespace {

retrieval::SearchConfig search_config_of(const RunConfig& config) {
    retrieval::SearchConfig search;
    search.community_gate = config.community_gate;
    return search;
}

reason::ReasonerConfig reasoner_config_of(const RunConfig& config) {
    reason::ReasonerConfig reasoner;
    reasoner.tot_single_call = config.tot_single_call;
    reasoner.chat_model = config.chat_model;
    return reasoner;
}

retrieval::RetrievalResult filter_items(const retrieval::RetrievalResult& full,
                                        double threshold) {
    retrieval::RetrievalResult out;
    out.query_req_id = full.query_req_id;
    out.threshold_used = threshold;
    for (const auto& item : full.items) {
        if (item.similarity >= threshold) out.items.push_back(item);
    }
    return out;
}

// Clause passages referenced by the ground truth, scanned out of the
// indexed reference chunks.
std::map<std::string, std::string> passages_from_chunks(const graph::GraphIndex& index) {
    std::vector<corpus::Document> pseudo_docs;
    for (const auto& chunk : index.chunks) {
        auto kind = index.document_kinds.find(chunk.doc_id);
        if (kind == index.document_kinds.end() ||
            kind->second != corpus::DocumentKind::Reference) {
            continue;
        }
        corpus::Document doc;
        doc.doc_id = chunk.chunk_id;
        doc.body = chunk.text;
        doc.kind = corpus::DocumentKind::Reference;
        pseudo_docs.push_back(std::move(doc));
    }
    return retrieval::extract_passages(pseudo_docs);
}

} // namespace

CheckOutput check_requirement(const RunConfig& config, const graph::GraphIndex& index,
                              llm::Gateway& gateway, const corpus::Requirement& requirement,
                              reason::Strategy strategy, const std::string& mode) {
    CheckOutput out;
    const std::string text = corpus::render_requirement(requirement);

    if (mode == "graph") {
        out.retrieval = retrieval::query_graph(index, requirement.req_id, text,
                                               config.similarity_threshold, gateway,
                                               search_config_of(config));
    } else {
        std::vector<std::pair<std::string, std::string>> id_texts;
        for (const auto& chunk : index.chunks) {
            auto kind = index.document_kinds.find(chunk.doc_id);
            if (kind != index.document_kinds.end() &&
                kind->second == corpus::DocumentKind::Reference) {
                id_texts.emplace_back(chunk.chunk_id, chunk.text);
            }
        }
        auto dense = retrieval::baseline_build(id_texts, gateway);
        auto scored = retrieval::baseline_retrieve(dense, text, config.baseline_top_k, gateway);
        out.retrieval.query_req_id = requirement.req_id;
        out.retrieval.threshold_used = config.similarity_threshold;
        for (const auto& entry : scored) {
            if (entry.similarity < config.similarity_threshold) continue;
            retrieval::RetrievalItem item;
            item.text = entry.text;
            item.similarity = entry.similarity;
            item.provenance.chunk_ids = {entry.ref_id};
            out.retrieval.items.push_back(std::move(item));
        }
    }

    out.classification = reason::classify(text, out.retrieval, strategy, gateway,
                                          reasoner_config_of(config));
    return out;
}

std::string verdicts_to_jsonl(const std::vector<VerdictRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        ordered_json line;
        line["req_id"] = record.req_id;
        line["mode"] = record.mode;
        line["strategy"] = record.strategy;
        line["label"] = to_string(record.label);
        if (record.verdict) {
            line["assessment"] = to_string(record.verdict->assessment);
            line["explanation"] = record.verdict->explanation;
            ordered_json trace = ordered_json::array();
            for (const auto& entry : record.verdict->trace) {
                trace.push_back({{"stage", entry.stage},
                                 {"prompt_sha256", entry.prompt_sha256},
                                 {"parsed_output", entry.parsed_output}});
            }
            line["trace"] = std::move(trace);
        }
        ordered_json retrieved = ordered_json::array();
        for (const auto& [ref_id, similarity] : record.retrieved) {
            retrieved.push_back({{"id", ref_id}, {"similarity", similarity}});
        }
        line["retrieved"] = std::move(retrieved);
        out += line.dump();
        out += "\n";
    }
    return out;
}

EvaluationOutputs evaluate(const RunConfig& config, const graph::GraphIndex& index,
                           llm::Gateway& gateway, const std::function<bool()>& interrupted) {
    validate(config);
    if (config.requirements_path.empty() || config.ground_truth_path.empty()) {
        throw Error(ErrorCode::ConfigError,
                    "evaluate needs requirements_path and ground_truth_path");
    }

    EvaluationOutputs outputs;
    auto requirements = corpus::load_requirements(config.requirements_path);
    auto ground_truth = retrieval::load_ground_truth(config.ground_truth_path);

    // Expected passage texts per requirement, resolved via clause ids.
    auto passages = passages_from_chunks(index);
    retrieval::ExpectedSets expected;
    std::vector<eval::LabeledPair> labeled_pairs;
    for (const auto& pair : ground_truth) {
        labeled_pairs.push_back({pair.req_id, pair.reference_passage_id, pair.label});
        if (pair.reference_passage_id.empty()) continue;
        auto it = passages.find(pair.reference_passage_id);
        if (it == passages.end()) {
            throw Error(ErrorCode::ConfigError,
                        "ground-truth passage id not found in corpus: " +
                            pair.reference_passage_id);
        }
        expected[pair.req_id].push_back(it->second);
    }

    // Retrieval once per mode (threshold 0 keeps all scored candidates so
    // one pass serves both classification and the coverage sweep).
    std::map<std::string, std::map<std::string, retrieval::RetrievalResult>> full_retrievals;
    std::map<std::string, eval::CoverageRun> coverage_runs;

    std::optional<retrieval::DenseIndex> dense;
    for (const auto& mode : config.retrieval_modes) {
        for (const auto& requirement : requirements) {
            if (interrupted && interrupted()) {
                throw Error(ErrorCode::IoError, "interrupted during retrieval");
            }
            const std::string text = corpus::render_requirement(requirement);
            retrieval::RetrievalResult full;
            if (mode == "graph") {
                full = retrieval::query_graph(index, requirement.req_id, text, 0.0, gateway,
                                              search_config_of(config));
            } else {
                if (!dense) {
                    std::vector<std::pair<std::string, std::string>> id_texts;
                    for (const auto& chunk : index.chunks) {
                        auto kind = index.document_kinds.find(chunk.doc_id);
                        if (kind != index.document_kinds.end() &&
                            kind->second == corpus::DocumentKind::Reference) {
                            id_texts.emplace_back(chunk.chunk_id, chunk.text);
                        }
                    }
                    dense = retrieval::baseline_build(id_texts, gateway);
                }
                full.query_req_id = requirement.req_id;
                full.threshold_used = 0.0;
                for (const auto& entry : retrieval::baseline_retrieve(
                         *dense, text, config.baseline_top_k, gateway)) {
                    retrieval::RetrievalItem item;
                    item.text = entry.text;
                    item.similarity = entry.similarity;
                    item.provenance.chunk_ids = {entry.ref_id};
                    full.items.push_back(std::move(item));
                }
            }
            for (const auto& item : full.items) {
                coverage_runs[mode].retrieved[requirement.req_id].emplace_back(item.text,
                                                                               item.similarity);
            }
            full_retrievals[mode].emplace(requirement.req_id, std::move(full));
        }
        coverage_runs[mode].expected = expected;
    }

    // Classification cells.
    for (const auto& mode : config.retrieval_modes) {
        for (const auto& strategy_name : config.strategies) {
            auto strategy = reason::strategy_from_string(strategy_name);
            try {
                std::vector<VerdictRecord> records;
                std::vector<eval::Prediction> predictions;
                for (const auto& requirement : requirements) {
                    if (interrupted && interrupted()) {
                        throw Error(ErrorCode::IoError, "interrupted during classification");
                    }
                    const auto& full = full_retrievals.at(mode).at(requirement.req_id);
                    auto filtered = filter_items(full, config.similarity_threshold);
                    auto classification = reason::classify(
                        corpus::render_requirement(requirement), filtered, strategy, gateway,
                        reasoner_config_of(config));

                    VerdictRecord record;
                    record.req_id = requirement.req_id;
                    record.mode = mode;
                    record.strategy = strategy_name;
                    record.label = classification.label;
                    record.verdict = classification.verdict;
                    for (const auto& item : filtered.items) {
                        record.retrieved.emplace_back(*item.provenance.chunk_ids.begin(),
                                                      item.similarity);
                    }
                    predictions.push_back({requirement.req_id, classification.label});
                    records.push_back(std::move(record));
                }
                auto matrix = eval::confusion(predictions, labeled_pairs);
                outputs.cells[mode][strategy_name] = std::move(records);
                outputs.report.cells[mode][strategy_name] = {matrix};
            } catch (const Error& e) {
                outputs.errors.push_back(mode + "/" + strategy_name + ": " + e.what());
            }
        }
    }

    // Coverage sweep over thresholds 0.5 to 0.95, step 0.05.
    outputs.report.curve = eval::coverage_curve(coverage_runs, eval::default_threshold_sweep());
    outputs.coverage_csv = eval::curve_to_csv(outputs.report.curve);

    // Run settings echoed into the report: only mode-independent fields, so
    // a record run and its replay render byte-identical reports.
    ordered_json report_manifest;
    report_manifest["similarity_threshold"] = config.similarity_threshold;
    report_manifest["retrieval_modes"] = config.retrieval_modes;
    report_manifest["strategies"] = config.strategies;
    report_manifest["chat_model"] = config.chat_model;
    report_manifest["embedding_model"] = config.embedding_model;
    report_manifest["seed"] = config.seed;
    report_manifest["requirements"] = requirements.size();
    report_manifest["ground_truth_pairs"] = ground_truth.size();
    report_manifest["tot_single_call"] = config.tot_single_call;

    ordered_json manifest = report_manifest;
    manifest["gateway_mode"] = config.gateway_mode;
    manifest["provider"] = config.provider;
    if (!outputs.errors.empty()) manifest["errors"] = outputs.errors;
    auto cost = gateway.cost_report();
    manifest["cost"] = {{"live_calls", cost.total.live_calls},
                        {"replay_hits", cost.total.replay_hits},
                        {"prompt_tokens", cost.total.prompt_tokens},
                        {"completion_tokens", cost.total.completion_tokens}};

    outputs.manifest = std::move(manifest);
    outputs.report.manifest = std::move(report_manifest);
    return outputs;
}

void write_evaluation_outputs(const EvaluationOutputs& outputs, const RunConfig& config) {
    std::filesystem::path out_dir(config.output_dir);
    std::filesystem::create_directories(out_dir);

    auto write = [&](const std::filesystem::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::trunc | std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + path.string());
        }
        out << content;
    };

    write(out_dir / "report.md", eval::render_report_markdown(outputs.report));
    write(out_dir / "report.json", eval::render_report_json(outputs.report));
    write(out_dir / "coverage.csv", outputs.coverage_csv);
    write(out_dir / "evaluate_manifest.json", outputs.manifest.dump(2) + "\n");
    for (const auto& [mode, strategies] : outputs.cells) {
        for (const auto& [strategy, records] : strategies) {
            write(out_dir / ("verdicts_" + mode + "_" + strategy + ".jsonl"),
                  verdicts_to_jsonl(records));
        }
    }
}

} // namespace reqcheck::pipeline
