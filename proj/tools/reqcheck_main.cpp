// reqcheck: compliance checking of software requirements against reference
// corpora via a graph index, with a dense-retrieval baseline and an
// evaluation harness.
//
// Exit codes: 0 success (check: Compliant), 1 runtime failure, 2 usage or
// configuration error, 3 check: NonCompliant, 4 check: Irrelevant,
// 130 interrupted.

#include "reqcheck/common/errors.hpp"
#include "reqcheck/corpus/chunker.hpp"
#include "reqcheck/corpus/clean.hpp"
#include "reqcheck/corpus/glossary.hpp"
#include "reqcheck/corpus/ingest.hpp"
#include "reqcheck/eval/metrics.hpp"
#include "reqcheck/eval/report.hpp"
#include "reqcheck/graph/persist.hpp"
#include "reqcheck/pipeline/evaluator.hpp"
#include "reqcheck/pipeline/index_builder.hpp"
#include "reqcheck/pipeline/run_config.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace reqcheck;
using nlohmann::ordered_json;

std::atomic<bool> g_interrupted{false};

void handle_signal(int) {
    g_interrupted.store(true);
}

bool interrupted() {
    return g_interrupted.load();
}

// Results go to stdout; logs and progress stay on stderr.
void emit(const ordered_json& payload) {
    std::cout << payload.dump(2) << "\n";
}

void log_line(const std::string& message) {
    std::cerr << message << "\n";
}

struct FlagOverrides {
    CLI::App* app = nullptr;

    template <typename T>
    void apply(const char* flag, T& target, const T& parsed) {
        if (app->count(flag) > 0) target = parsed;
    }
};

graph::GraphIndex load_index_or_fail(const pipeline::RunConfig& config) {
    auto path = pipeline::graph_dump_path(config);
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::IndexNotFound,
                    path.string() + " (run 'reqcheck build-index' first)");
    }
    return graph::load_graph(path);
}

int run(int argc, char** argv) {
    CLI::App app{"Graph-based compliance checking for software requirements"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    // Flag values; applied over the config file only when explicitly set.
    std::vector<std::string> corpus;
    std::string requirements_path;
    std::string ground_truth_path;
    std::string output_dir;
    std::string gateway_mode;
    std::string provider;
    std::string chat_model;
    std::string embedding_model;
    std::string api_base;
    std::string cache_path;
    double threshold = 0.7;
    std::size_t chunk_size = 600;
    std::size_t overlap = 100;
    std::size_t max_gleanings = 1;
    double resolution = 1.0;
    std::uint64_t seed = 0;
    int max_concurrency = 4;
    std::vector<std::string> strategies;
    std::vector<std::string> retrieval_modes;
    bool tot_single_call = false;

    app.add_option("--corpus", corpus, "Reference corpus files or directories");
    app.add_option("--requirements", requirements_path, "Requirement set (JSON lines)");
    app.add_option("--ground-truth", ground_truth_path, "Ground truth CSV");
    app.add_option("--output-dir", output_dir, "Output directory");
    app.add_option("--gateway-mode", gateway_mode, "live | record | replay");
    app.add_option("--provider", provider, "openai | scripted");
    app.add_option("--chat-model", chat_model, "Chat model name");
    app.add_option("--embedding-model", embedding_model, "Embedding model name");
    app.add_option("--api-base", api_base, "OpenAI-compatible API base URL");
    app.add_option("--cache", cache_path, "Replay cache path");
    app.add_option("--threshold", threshold, "Similarity threshold in [0,1]");
    app.add_option("--chunk-size", chunk_size, "Chunk size in tokens");
    app.add_option("--overlap", overlap, "Chunk overlap in tokens");
    app.add_option("--max-gleanings", max_gleanings, "Extraction gleaning rounds");
    app.add_option("--resolution", resolution, "Community detection resolution");
    app.add_option("--seed", seed, "Seed for community detection");
    app.add_option("--max-concurrency", max_concurrency, "Max in-flight provider calls");
    app.add_option("--strategy", strategies, "Reasoning strategies: io cot tot");
    app.add_option("--retrieval-mode", retrieval_modes, "Retrieval modes: graph baseline");
    app.add_flag("--tot-single-call", tot_single_call,
                 "Run ToT stages as single roleplay calls");

    auto* cmd_ingest = app.add_subcommand("ingest", "Ingest and validate the corpus");
    auto* cmd_build = app.add_subcommand("build-index", "Build and persist the graph index");
    auto* cmd_inspect = app.add_subcommand("inspect-graph", "Summarize a persisted index");
    auto* cmd_check = app.add_subcommand("check", "Check one requirement");
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Evaluate the configured dataset");
    auto* cmd_report = app.add_subcommand("report", "Re-render reports from verdict files");
    for (auto* sub : {cmd_ingest, cmd_build, cmd_inspect, cmd_check, cmd_evaluate, cmd_report}) {
        sub->fallthrough(); // global flags may appear after the subcommand
    }

    std::string check_target;
    std::string check_strategy = "io";
    std::string check_mode = "graph";
    cmd_check->add_option("requirement", check_target, "Requirement id or literal text")
        ->required();
    cmd_check->add_option("--use-strategy", check_strategy, "io | cot | tot");
    cmd_check->add_option("--use-mode", check_mode, "graph | baseline");

    CLI11_PARSE(app, argc, argv);

    // Precedence: defaults < config file < explicit flags.
    pipeline::RunConfig config;
    if (!config_path.empty()) config = pipeline::load_config_file(config_path);
    FlagOverrides overrides{&app};
    overrides.apply("--corpus", config.corpus_paths, corpus);
    overrides.apply("--requirements", config.requirements_path, requirements_path);
    overrides.apply("--ground-truth", config.ground_truth_path, ground_truth_path);
    overrides.apply("--output-dir", config.output_dir, output_dir);
    overrides.apply("--gateway-mode", config.gateway_mode, gateway_mode);
    overrides.apply("--provider", config.provider, provider);
    overrides.apply("--chat-model", config.chat_model, chat_model);
    overrides.apply("--embedding-model", config.embedding_model, embedding_model);
    overrides.apply("--api-base", config.api_base_url, api_base);
    overrides.apply("--cache", config.cache_path, cache_path);
    overrides.apply("--threshold", config.similarity_threshold, threshold);
    overrides.apply("--chunk-size", config.chunk_size_tokens, chunk_size);
    overrides.apply("--overlap", config.overlap_tokens, overlap);
    overrides.apply("--max-gleanings", config.max_gleanings, max_gleanings);
    overrides.apply("--resolution", config.community_resolution, resolution);
    overrides.apply("--seed", config.seed, seed);
    overrides.apply("--max-concurrency", config.max_concurrency, max_concurrency);
    overrides.apply("--strategy", config.strategies, strategies);
    overrides.apply("--retrieval-mode", config.retrieval_modes, retrieval_modes);
    if (app.count("--tot-single-call") > 0) config.tot_single_call = tot_single_call;

    std::signal(SIGINT, handle_signal);

    if (cmd_ingest->parsed()) {
        pipeline::validate(config);
        std::vector<std::string> warnings;
        ordered_json summary;
        ordered_json docs = ordered_json::array();
        std::vector<corpus::GlossaryEntry> glossary;
        corpus::ChunkConfig chunk_config{config.chunk_size_tokens, config.overlap_tokens};

        for (const auto& path : config.corpus_paths) {
            std::vector<std::filesystem::path> files;
            if (std::filesystem::is_directory(path)) {
                for (const auto& entry : std::filesystem::directory_iterator(path)) {
                    auto ext = entry.path().extension().string();
                    if (entry.is_regular_file() && (ext == ".txt" || ext == ".md")) {
                        files.push_back(entry.path());
                    }
                }
                std::sort(files.begin(), files.end());
            } else {
                files.emplace_back(path);
            }
            for (const auto& file : files) {
                auto document = corpus::ingest(file, corpus::DocumentKind::Reference, &warnings);
                document.body = corpus::clean_text(document.body,
                                                   corpus::default_clean_passes());
                auto entries = corpus::extract_glossary(document);
                glossary.insert(glossary.end(), entries.begin(), entries.end());
                auto chunks = corpus::chunk(document, chunk_config);
                docs.push_back({{"doc_id", document.doc_id},
                                {"title", document.title},
                                {"chunks", chunks.size()},
                                {"glossary_entries", entries.size()}});
            }
        }
        std::size_t requirement_count = 0;
        if (!config.requirements_path.empty()) {
            requirement_count = corpus::load_requirements(config.requirements_path).size();
        }
        std::filesystem::create_directories(config.output_dir);
        std::ofstream glossary_out(std::filesystem::path(config.output_dir) / "glossary.json");
        glossary_out << corpus::glossary_to_json(glossary);

        summary["documents"] = std::move(docs);
        summary["requirements"] = requirement_count;
        summary["glossary_entries"] = glossary.size();
        summary["warnings"] = warnings;
        emit(summary);
        return 0;
    }

    if (cmd_build->parsed()) {
        pipeline::validate(config);
        auto gateway = pipeline::make_gateway(config);
        log_line("building index (" + std::to_string(config.corpus_paths.size()) +
                 " corpus paths, mode " + config.gateway_mode + ")");
        try {
            auto result = pipeline::build_index(config, *gateway, interrupted);
            pipeline::write_build_outputs(result, config);
            emit(result.manifest);
        } catch (const Error&) {
            if (!g_interrupted.load()) throw;
            // Ctrl-C: the replay cache is already flushed per append; leave a
            // manifest stub so the partial run is identifiable.
            std::filesystem::create_directories(config.output_dir);
            std::ofstream(std::filesystem::path(config.output_dir) / "build_manifest.json")
                << "{\n  \"interrupted\": true\n}\n";
            return 130;
        }
        return 0;
    }

    if (cmd_inspect->parsed()) {
        auto index = load_index_or_fail(config);
        std::filesystem::create_directories(config.output_dir);
        auto graphml_path = std::filesystem::path(config.output_dir) / "graph.graphml";
        std::ofstream graphml(graphml_path, std::ios::trunc);
        graphml << graph::to_graphml(index);

        ordered_json summary;
        summary["nodes"] = index.graph.nodes().size();
        summary["edges"] = index.graph.edges().size();
        summary["chunks"] = index.chunks.size();
        summary["community_levels"] = index.communities.level_count();
        summary["communities"] = index.communities.all().size();
        summary["reports"] = index.reports.size();
        ordered_json levels = ordered_json::array();
        for (std::size_t level = 0; level < index.communities.level_count(); ++level) {
            levels.push_back(index.communities.at_level(level).size());
        }
        summary["communities_per_level"] = std::move(levels);
        summary["graphml"] = graphml_path.string();
        emit(summary);
        return 0;
    }

    if (cmd_check->parsed()) {
        auto index = load_index_or_fail(config);
        auto gateway = pipeline::make_gateway(config);

        corpus::Requirement requirement;
        if (!config.requirements_path.empty()) {
            for (auto& candidate : corpus::load_requirements(config.requirements_path)) {
                if (candidate.req_id == check_target) {
                    requirement = std::move(candidate);
                    break;
                }
            }
        }
        if (requirement.req_id.empty()) {
            if (check_target.find(' ') == std::string::npos) {
                std::cerr << "error: unknown requirement id '" << check_target << "'\n";
                return 2;
            }
            requirement.req_id = "adhoc";
            requirement.text = check_target;
        }

        auto strategy = reason::strategy_from_string(check_strategy);
        auto output = pipeline::check_requirement(config, index, *gateway, requirement,
                                                  strategy, check_mode);

        ordered_json payload;
        payload["req_id"] = requirement.req_id;
        payload["strategy"] = check_strategy;
        payload["mode"] = check_mode;
        payload["threshold"] = output.retrieval.threshold_used;
        ordered_json items = ordered_json::array();
        for (const auto& item : output.retrieval.items) {
            items.push_back({{"id", *item.provenance.chunk_ids.begin()},
                             {"similarity", item.similarity},
                             {"text", item.text}});
        }
        payload["retrieved"] = std::move(items);
        payload["label"] = to_string(output.classification.label);
        if (output.classification.verdict) {
            payload["assessment"] = to_string(output.classification.verdict->assessment);
            payload["explanation"] = output.classification.verdict->explanation;
            ordered_json trace = ordered_json::array();
            for (const auto& entry : output.classification.verdict->trace) {
                trace.push_back({{"stage", entry.stage},
                                 {"prompt_sha256", entry.prompt_sha256}});
            }
            payload["trace"] = std::move(trace);
        }
        emit(payload);

        switch (output.classification.label) {
            case Label::Compliant: return 0;
            case Label::NonCompliant: return 3;
            case Label::Irrelevant: return 4;
        }
        return 1;
    }

    if (cmd_evaluate->parsed()) {
        auto index = load_index_or_fail(config);
        auto gateway = pipeline::make_gateway(config);
        log_line("evaluating " + std::to_string(config.retrieval_modes.size()) + " mode(s) x " +
                 std::to_string(config.strategies.size()) + " strategy(ies)");
        try {
            auto outputs = pipeline::evaluate(config, index, *gateway, interrupted);
            pipeline::write_evaluation_outputs(outputs, config);
            emit(outputs.manifest);
            if (!outputs.errors.empty()) {
                for (const auto& error : outputs.errors) log_line("cell failed: " + error);
                return 1;
            }
        } catch (const Error&) {
            if (!g_interrupted.load()) throw;
            std::filesystem::create_directories(config.output_dir);
            std::ofstream(std::filesystem::path(config.output_dir) /
                          "evaluate_manifest.json")
                << "{\n  \"interrupted\": true\n}\n";
            return 130;
        }
        return 0;
    }

    if (cmd_report->parsed()) {
        // Re-render from existing verdict files plus ground truth.
        if (config.ground_truth_path.empty()) {
            throw Error(ErrorCode::ConfigError, "report needs --ground-truth");
        }
        auto ground_truth = retrieval::load_ground_truth(config.ground_truth_path);
        std::vector<eval::LabeledPair> labeled;
        for (const auto& pair : ground_truth) {
            labeled.push_back({pair.req_id, pair.reference_passage_id, pair.label});
        }

        eval::ReportInput input;
        std::filesystem::path out_dir(config.output_dir);
        for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
            auto name = entry.path().filename().string();
            if (name.rfind("verdicts_", 0) != 0 || entry.path().extension() != ".jsonl") {
                continue;
            }
            std::ifstream in(entry.path());
            std::string line;
            std::vector<eval::Prediction> predictions;
            std::string mode;
            std::string strategy;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto parsed = nlohmann::json::parse(line);
                mode = parsed.value("mode", "");
                strategy = parsed.value("strategy", "");
                predictions.push_back(
                    {parsed.at("req_id").get<std::string>(),
                     label_from_string(parsed.at("label").get<std::string>())});
            }
            if (!predictions.empty()) {
                input.cells[mode][strategy] = {eval::confusion(predictions, labeled)};
            }
        }
        if (input.cells.empty()) {
            throw Error(ErrorCode::ConfigError,
                        "no verdicts_*.jsonl files in " + out_dir.string());
        }
        input.manifest["similarity_threshold"] = config.similarity_threshold;
        input.manifest["rerendered"] = true;

        std::ofstream md(out_dir / "report.md", std::ios::trunc);
        md << eval::render_report_markdown(input);
        std::ofstream js(out_dir / "report.json", std::ios::trunc);
        js << eval::render_report_json(input);
        emit({{"rerendered", true}, {"cells", input.cells.size()}});
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (g_interrupted.load()) return 130;
        return e.code() == ErrorCode::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
