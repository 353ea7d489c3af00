#pragma once

#include "reqcheck/graph/community.hpp"
#include "reqcheck/graph/knowledge_graph.hpp"
#include "reqcheck/llm/gateway.hpp"

#include <map>
#include <string>
#include <vector>

namespace reqcheck::graph {

struct Finding {
    std::string summary;
    std::string explanation;
};

struct CommunityReport {
    std::string community_id;
    std::string title;
    std::string summary;
    double impact_severity = 0.0; // clamped to [0,10]
    std::string rating_explanation;
    std::vector<Finding> findings;
};

struct ReportOutcome {
    CommunityReport report;
    std::vector<std::string> warnings; // e.g. severity clamped
};

/// Parses an LLM community-report reply (a JSON object, possibly wrapped in
/// prose or code fences). Severity outside [0,10] is clamped with a warning;
/// findings beyond 10 are truncated. Throws LlmProtocolError when no usable
/// JSON object is present or required fields are missing.
ReportOutcome parse_community_report(const std::string& response_text,
                                     std::size_t min_findings);

/// Builds the community-report prompt by packing the highest-ranked content
/// first — sub-community report summaries when available, member entities by
/// degree otherwise — until `token_budget` is reached (always at least one
/// item), then asks the LLM and parses the reply. One repair attempt on
/// protocol violations.
ReportOutcome summarize_community(const KnowledgeGraph& graph, const Community& community,
                                  const std::map<std::string, CommunityReport>& child_reports,
                                  std::size_t token_budget, llm::Gateway& gateway);

/// Text used when ranking a community against a query: its report summary if
/// available, otherwise a deterministic digest of member names/descriptions.
std::string community_summary_text(const KnowledgeGraph& graph, const Community& community,
                                   const std::map<std::string, CommunityReport>& reports);

} // namespace reqcheck::graph
