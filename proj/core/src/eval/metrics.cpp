#include "reqcheck/eval/metrics.hpp"

#include "reqcheck/common/errors.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace reqcheck::eval {

namespace {

inline std::size_t index_of(Label label) {
    return static_cast<std::size_t>(label);
}

} // namespace

void ConfusionMatrix::add(Label truth, Label predicted, std::size_t count) {
    counts_[index_of(truth)][index_of(predicted)] += count;
}

std::size_t ConfusionMatrix::at(Label truth, Label predicted) const {
    return counts_[index_of(truth)][index_of(predicted)];
}

std::size_t ConfusionMatrix::row_sum(Label truth) const {
    std::size_t sum = 0;
    for (const auto& cell : counts_[index_of(truth)]) sum += cell;
    return sum;
}

std::size_t ConfusionMatrix::column_sum(Label predicted) const {
    std::size_t sum = 0;
    for (const auto& row : counts_) sum += row[index_of(predicted)];
    return sum;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t sum = 0;
    for (const auto& row : counts_) {
        for (const auto& cell : row) sum += cell;
    }
    return sum;
}

ConfusionMatrix confusion(const std::vector<Prediction>& predictions,
                          const std::vector<LabeledPair>& ground_truth) {
    // Reduce pairs to one label per requirement: any non-compliant pair makes
    // the requirement non-compliant, else any compliant pair makes it
    // compliant, else irrelevant.
    std::map<std::string, Label> truth;
    for (const auto& pair : ground_truth) {
        auto [it, inserted] = truth.emplace(pair.req_id, pair.true_label);
        if (inserted) continue;
        if (pair.true_label == Label::NonCompliant) {
            it->second = Label::NonCompliant;
        } else if (pair.true_label == Label::Compliant && it->second == Label::Irrelevant) {
            it->second = Label::Compliant;
        }
    }

    ConfusionMatrix matrix;
    for (const auto& prediction : predictions) {
        auto it = truth.find(prediction.req_id);
        if (it == truth.end()) {
            throw Error(ErrorCode::MissingGroundTruth, prediction.req_id);
        }
        matrix.add(it->second, prediction.label);
    }
    return matrix;
}

double f1_score(double precision, double recall) {
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

ClassMetrics metrics_for(const ConfusionMatrix& matrix, Label cls) {
    ClassMetrics metrics;
    const double diagonal = static_cast<double>(matrix.at(cls, cls));
    const double column = static_cast<double>(matrix.column_sum(cls));
    const double row = static_cast<double>(matrix.row_sum(cls));
    metrics.precision = column > 0.0 ? 100.0 * diagonal / column : 0.0;
    metrics.recall = row > 0.0 ? 100.0 * diagonal / row : 0.0;
    metrics.f1 = f1_score(metrics.precision, metrics.recall);
    return metrics;
}

ClassMetrics macro_metrics(const ConfusionMatrix& matrix) {
    ClassMetrics macro;
    for (Label cls : {Label::Compliant, Label::NonCompliant, Label::Irrelevant}) {
        ClassMetrics metrics = metrics_for(matrix, cls);
        macro.precision += metrics.precision / 3.0;
        macro.recall += metrics.recall / 3.0;
        macro.f1 += metrics.f1 / 3.0;
    }
    return macro;
}

std::vector<CurvePoint> coverage_curve(const std::map<std::string, CoverageRun>& runs,
                                       const std::vector<double>& thresholds) {
    if (thresholds.empty()) {
        throw Error(ErrorCode::ConfigError, "coverage_curve needs at least one threshold");
    }
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (thresholds[i] < thresholds[i - 1]) {
            throw Error(ErrorCode::ConfigError, "thresholds must be sorted ascending");
        }
    }

    std::vector<CurvePoint> curve;
    curve.reserve(thresholds.size());
    for (double threshold : thresholds) {
        CurvePoint point;
        point.threshold = threshold;
        for (const auto& [config_name, run] : runs) {
            point.coverage_by_config[config_name] =
                retrieval::coverage(run.retrieved, run.expected, threshold).aggregate;
        }
        curve.push_back(std::move(point));
    }
    return curve;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out << "threshold";
    if (!curve.empty()) {
        for (const auto& [config_name, coverage] : curve.front().coverage_by_config) {
            out << "," << config_name;
        }
    }
    out << "\n";
    char buffer[32];
    for (const auto& point : curve) {
        std::snprintf(buffer, sizeof(buffer), "%.2f", point.threshold);
        out << buffer;
        for (const auto& [config_name, coverage] : point.coverage_by_config) {
            std::snprintf(buffer, sizeof(buffer), "%.4f", coverage);
            out << "," << buffer;
        }
        out << "\n";
    }
    return out.str();
}

std::vector<double> default_threshold_sweep() {
    std::vector<double> thresholds;
    for (int i = 50; i <= 95; i += 5) {
        thresholds.push_back(static_cast<double>(i) / 100.0);
    }
    return thresholds;
}

} // namespace reqcheck::eval
