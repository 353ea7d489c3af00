#include "reqcheck/retrieval/coverage.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace reqcheck::retrieval {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

} // namespace

std::vector<GroundTruthPair> load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::UnreadableFile, "cannot open ground truth " + path.string());
    }

    std::vector<GroundTruthPair> pairs;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strings::trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() < 3) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(line_no) +
                            ": expected req_id,reference_passage_id,label");
        }
        GroundTruthPair pair;
        pair.req_id = strings::trim(fields[0]);
        pair.reference_passage_id = strings::trim(fields[1]);
        pair.label = label_from_string(fields[2]);
        if (!seen.insert({pair.req_id, pair.reference_passage_id}).second) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(line_no) + ": duplicate pair (" +
                            pair.req_id + ", " + pair.reference_passage_id + ")");
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::map<std::string, std::string> extract_passages(
    const std::vector<corpus::Document>& references) {
    static const std::regex clause_id(R"(\((\d+(?:\.\d+)+)\))");
    std::map<std::string, std::string> passages;
    for (const auto& document : references) {
        if (document.kind != corpus::DocumentKind::Reference) continue;
        for (const auto& line : strings::split_lines(document.body)) {
            std::smatch match;
            if (std::regex_search(line, match, clause_id)) {
                auto trimmed = strings::trim(line);
                if (!trimmed.empty()) passages.emplace(match[1].str(), trimmed);
            }
        }
    }
    return passages;
}

CoverageResult coverage(const RetrievedSets& retrieved, const ExpectedSets& expected,
                        double threshold) {
    CoverageResult result;
    for (const auto& [req_id, passages] : expected) {
        if (passages.empty()) continue;

        std::vector<std::string> kept;
        if (auto it = retrieved.find(req_id); it != retrieved.end()) {
            for (const auto& [text, similarity] : it->second) {
                if (similarity >= threshold) kept.push_back(strings::normalize_ws(text));
            }
        }

        std::size_t matched = 0;
        for (const auto& passage : passages) {
            const std::string want = strings::normalize_ws(passage);
            bool hit = false;
            for (const auto& have : kept) {
                if (have == want || have.find(want) != std::string::npos) {
                    hit = true;
                    break;
                }
            }
            if (hit) ++matched;
        }
        result.matched += matched;
        result.total += passages.size();
        result.per_requirement[req_id] =
            static_cast<double>(matched) / static_cast<double>(passages.size());
    }
    result.aggregate = result.total == 0
                           ? 0.0
                           : static_cast<double>(result.matched) /
                                 static_cast<double>(result.total);
    return result;
}

} // namespace reqcheck::retrieval
