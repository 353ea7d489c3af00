#pragma once

#include "reqcheck/common/labels.hpp"
#include "reqcheck/retrieval/coverage.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace reqcheck::eval {

struct LabeledPair {
    std::string req_id;
    std::string reference_id;
    Label true_label = Label::Irrelevant;
};

struct Prediction {
    std::string req_id;
    Label label = Label::Irrelevant;
};

/// 3x3 counts indexed (true, predicted) over {Compliant, NonCompliant,
/// Irrelevant}.
class ConfusionMatrix {
public:
    void add(Label truth, Label predicted, std::size_t count = 1);
    std::size_t at(Label truth, Label predicted) const;
    std::size_t row_sum(Label truth) const;
    std::size_t column_sum(Label predicted) const;
    std::size_t total() const;

private:
    std::array<std::array<std::size_t, 3>, 3> counts_{};
};

/// Builds the matrix from requirement-level predictions against ground-truth
/// pairs. Multiple pairs for one requirement reduce to a single label
/// (non-compliant wins over compliant wins over irrelevant). A prediction
/// without ground truth throws MissingGroundTruth.
ConfusionMatrix confusion(const std::vector<Prediction>& predictions,
                          const std::vector<LabeledPair>& ground_truth);

/// Percent scale [0,100]; rounding happens only at render time.
struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// One-vs-rest from the 3x3 matrix: precision = diagonal / column sum,
/// recall = diagonal / row sum, zero denominators give 0.
ClassMetrics metrics_for(const ConfusionMatrix& matrix, Label cls);

/// Unweighted mean over the three classes.
ClassMetrics macro_metrics(const ConfusionMatrix& matrix);

/// F1 from percent precision/recall: 2PR/(P+R), 0 when P+R == 0.
double f1_score(double precision, double recall);

struct CoverageRun {
    retrieval::RetrievedSets retrieved;
    retrieval::ExpectedSets expected;
};

struct CurvePoint {
    double threshold = 0.0;
    std::map<std::string, double> coverage_by_config;
};

/// Coverage per configuration at each threshold (thresholds ascending).
/// For a fixed retrieval the curve is non-increasing in the threshold.
std::vector<CurvePoint> coverage_curve(const std::map<std::string, CoverageRun>& runs,
                                       const std::vector<double>& thresholds);

/// CSV with header "threshold,<config>,..." suitable for plotting.
std::string curve_to_csv(const std::vector<CurvePoint>& curve);

/// The standard sweep: 0.5 to 0.95 in steps of 0.05.
std::vector<double> default_threshold_sweep();

} // namespace reqcheck::eval
