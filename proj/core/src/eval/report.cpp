#include "reqcheck/eval/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace reqcheck::eval {

namespace {

const std::vector<std::string>& strategy_order() {
    static const std::vector<std::string> order = {"io", "cot", "tot"};
    return order;
}

std::string strategy_title(const std::string& strategy) {
    if (strategy == "io") return "IO";
    if (strategy == "cot") return "CoT";
    if (strategy == "tot") return "ToT";
    return strategy;
}

double round2(double value) {
    return std::round(value * 100.0) / 100.0;
}

std::string fmt2(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", round2(value));
    return buffer;
}

std::vector<std::string> strategies_present(const ReportInput& input) {
    std::set<std::string> seen;
    for (const auto& [config_name, cells] : input.cells) {
        for (const auto& [strategy, cell] : cells) seen.insert(strategy);
    }
    std::vector<std::string> ordered;
    for (const auto& strategy : strategy_order()) {
        if (seen.count(strategy)) ordered.push_back(strategy);
    }
    for (const auto& strategy : seen) {
        if (std::find(ordered.begin(), ordered.end(), strategy) == ordered.end()) {
            ordered.push_back(strategy);
        }
    }
    return ordered;
}

} // namespace

std::string render_report_markdown(const ReportInput& input) {
    std::ostringstream out;
    auto strategies = strategies_present(input);

    out << "# Compliance evaluation report\n\n";

    if (!input.manifest.empty()) {
        out << "## Run settings\n\n";
        for (const auto& [key, value] : input.manifest.items()) {
            out << "- " << key << ": " << (value.is_string() ? value.get<std::string>()
                                                             : value.dump())
                << "\n";
        }
        out << "\n";
    }

    // Headline: non-compliant class, Tables-style layout.
    out << "## Non-compliant class results\n\n";
    out << "| Configuration |";
    for (const auto& strategy : strategies) {
        auto title = strategy_title(strategy);
        out << " " << title << " P | " << title << " R | " << title << " F1 |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < strategies.size() * 3; ++i) out << "---|";
    out << "\n";
    for (const auto& [config_name, cells] : input.cells) {
        out << "| " << config_name << " |";
        for (const auto& strategy : strategies) {
            auto it = cells.find(strategy);
            if (it == cells.end()) {
                out << " - | - | - |";
                continue;
            }
            auto metrics = metrics_for(it->second.matrix, Label::NonCompliant);
            out << " " << fmt2(metrics.precision) << " | " << fmt2(metrics.recall) << " | "
                << fmt2(metrics.f1) << " |";
        }
        out << "\n";
    }
    out << "\n";

    out << "## Per-class metrics\n\n";
    for (const auto& [config_name, cells] : input.cells) {
        for (const auto& [strategy, cell] : cells) {
            out << "### " << config_name << " / " << strategy_title(strategy) << "\n\n";
            out << "| Class | P | R | F1 |\n|---|---|---|---|\n";
            for (Label cls : {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
                auto metrics = metrics_for(cell.matrix, cls);
                out << "| " << label_abbrev(cls) << " | " << fmt2(metrics.precision) << " | "
                    << fmt2(metrics.recall) << " | " << fmt2(metrics.f1) << " |\n";
            }
            auto macro = macro_metrics(cell.matrix);
            out << "| macro | " << fmt2(macro.precision) << " | " << fmt2(macro.recall)
                << " | " << fmt2(macro.f1) << " |\n\n";

            out << "Confusion matrix (rows = true, columns = predicted, total "
                << cell.matrix.total() << "):\n\n";
            out << "| true\\pred | C | NC | IR |\n|---|---|---|---|\n";
            for (Label truth : {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
                out << "| " << label_abbrev(truth) << " |";
                for (Label predicted :
                     {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
                    out << " " << cell.matrix.at(truth, predicted) << " |";
                }
                out << "\n";
            }
            out << "\n";
        }
    }

    if (!input.curve.empty()) {
        out << "## Coverage by similarity threshold\n\n";
        out << "| threshold |";
        for (const auto& [config_name, coverage] : input.curve.front().coverage_by_config) {
            out << " " << config_name << " |";
        }
        out << "\n|---|";
        for (std::size_t i = 0; i < input.curve.front().coverage_by_config.size(); ++i) {
            out << "---|";
        }
        out << "\n";
        for (const auto& point : input.curve) {
            out << "| " << fmt2(point.threshold) << " |";
            for (const auto& [config_name, coverage] : point.coverage_by_config) {
                out << " " << fmt2(100.0 * coverage) << " |";
            }
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string render_report_json(const ReportInput& input) {
    nlohmann::ordered_json report;
    if (!input.manifest.empty()) report["manifest"] = input.manifest;

    nlohmann::ordered_json configurations = nlohmann::ordered_json::object();
    for (const auto& [config_name, cells] : input.cells) {
        nlohmann::ordered_json per_config = nlohmann::ordered_json::object();
        for (const auto& [strategy, cell] : cells) {
            nlohmann::ordered_json per_strategy;
            nlohmann::ordered_json classes = nlohmann::ordered_json::object();
            for (Label cls : {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
                auto metrics = metrics_for(cell.matrix, cls);
                classes[label_abbrev(cls)] = {{"precision", round2(metrics.precision)},
                                              {"recall", round2(metrics.recall)},
                                              {"f1", round2(metrics.f1)}};
            }
            auto macro = macro_metrics(cell.matrix);
            classes["macro"] = {{"precision", round2(macro.precision)},
                                {"recall", round2(macro.recall)},
                                {"f1", round2(macro.f1)}};
            per_strategy["metrics"] = std::move(classes);

            nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
            for (Label truth : {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
                nlohmann::ordered_json row = nlohmann::ordered_json::array();
                for (Label predicted :
                     {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
                    row.push_back(cell.matrix.at(truth, predicted));
                }
                matrix.push_back(std::move(row));
            }
            per_strategy["confusion"] = std::move(matrix);
            per_strategy["total"] = cell.matrix.total();
            per_config[strategy] = std::move(per_strategy);
        }
        configurations[config_name] = std::move(per_config);
    }
    report["configurations"] = std::move(configurations);

    if (!input.curve.empty()) {
        nlohmann::ordered_json curve = nlohmann::ordered_json::array();
        for (const auto& point : input.curve) {
            nlohmann::ordered_json entry;
            entry["threshold"] = round2(point.threshold);
            for (const auto& [config_name, coverage] : point.coverage_by_config) {
                entry[config_name] = round2(100.0 * coverage);
            }
            curve.push_back(std::move(entry));
        }
        report["coverage_curve"] = std::move(curve);
    }
    return report.dump(2) + "\n";
}

} // namespace reqcheck::eval
