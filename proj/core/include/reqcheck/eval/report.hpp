#pragma once

#include "reqcheck/eval/metrics.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace reqcheck::eval {

/// Results of one (configuration x strategy) evaluation cell.
struct CellResult {
    ConfusionMatrix matrix;
};

struct ReportInput {
    /// configuration -> strategy ("io"/"cot"/"tot") -> cell
    std::map<std::string, std::map<std::string, CellResult>> cells;
    std::vector<CurvePoint> curve; // empty -> coverage section omitted
    nlohmann::ordered_json manifest; // run settings echoed into the report
};

/// Markdown mirroring the headline-table layout: one row per configuration,
/// strategy columns with P/R/F1 sub-columns for the non-compliant class,
/// followed by per-class metrics, confusion matrices and the coverage table.
/// Deterministic; numbers rounded to two decimals at render time only.
std::string render_report_markdown(const ReportInput& input);

/// JSON rendering with the same (identically rounded) numbers.
std::string render_report_json(const ReportInput& input);

} // namespace reqcheck::eval
