#pragma once

#include "reqcheck/common/labels.hpp"
#include "reqcheck/corpus/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace reqcheck::retrieval {

struct GroundTruthPair {
    std::string req_id;
    std::string reference_passage_id; // empty for irrelevant requirements
    Label label = Label::Irrelevant;
};

/// CSV with header req_id,reference_passage_id,label. (req_id, passage_id)
/// pairs must be unique.
std::vector<GroundTruthPair> load_ground_truth(const std::filesystem::path& path);

/// Reference passages addressable by clause id: any line containing a
/// dotted clause number like (3.1.6) becomes the passage for that id.
std::map<std::string, std::string> extract_passages(
    const std::vector<corpus::Document>& references);

/// Retrieved texts with similarities, so a single retrieval pass can be
/// re-evaluated across a threshold sweep.
using RetrievedSets = std::map<std::string, std::vector<std::pair<std::string, double>>>;
using ExpectedSets = std::map<std::string, std::vector<std::string>>;

struct CoverageResult {
    double aggregate = 0.0; // matched / total expected passages
    std::map<std::string, double> per_requirement;
    std::size_t matched = 0;
    std::size_t total = 0;
};

/// Exact-match coverage at a threshold: a ground-truth passage counts as
/// covered when, after whitespace/case normalization, it equals or is
/// contained in a retrieved text with similarity >= threshold.
CoverageResult coverage(const RetrievedSets& retrieved, const ExpectedSets& expected,
                        double threshold);

} // namespace reqcheck::retrieval
