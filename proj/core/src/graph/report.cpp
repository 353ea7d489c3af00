#include "reqcheck/graph/report.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"
#include "reqcheck/corpus/tokenizer.hpp"
#include "reqcheck/prompts/registry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace reqcheck::graph {

using nlohmann::json;

namespace {

std::string extract_json_object(const std::string& text) {
    std::size_t open = text.find('{');
    std::size_t close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close <= open) return {};
    return text.substr(open, close - open + 1);
}

llm::ChatRequest report_request(llm::Gateway& gateway, std::string prompt) {
    llm::ChatRequest request;
    request.model_name = gateway.config().chat_model;
    request.messages.push_back({llm::Role::User, std::move(prompt)});
    request.max_tokens = 4096;
    request.request_tag = "community-report";
    return request;
}

} // namespace

ReportOutcome parse_community_report(const std::string& response_text,
                                     std::size_t min_findings) {
    std::string blob = extract_json_object(response_text);
    if (blob.empty()) {
        throw Error(ErrorCode::LlmProtocolError, "community report reply has no JSON object");
    }
    json parsed;
    try {
        parsed = json::parse(blob);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::LlmProtocolError,
                    std::string("community report JSON invalid: ") + e.what());
    }

    ReportOutcome outcome;
    auto& report = outcome.report;
    report.title = parsed.value("title", "");
    report.summary = parsed.value("summary", "");
    report.rating_explanation = parsed.value("rating_explanation", "");
    if (report.title.empty() || report.summary.empty()) {
        throw Error(ErrorCode::LlmProtocolError, "community report missing title or summary");
    }

    double severity = 0.0;
    if (parsed.contains("impact_severity")) {
        if (parsed["impact_severity"].is_number()) {
            severity = parsed["impact_severity"].get<double>();
        } else if (parsed["impact_severity"].is_string()) {
            try {
                severity = std::stod(parsed["impact_severity"].get<std::string>());
            } catch (...) {
                severity = 0.0;
            }
        }
    }
    if (severity < 0.0 || severity > 10.0) {
        outcome.warnings.push_back("impact severity " + std::to_string(severity) +
                                   " clamped to [0,10]");
        severity = std::clamp(severity, 0.0, 10.0);
    }
    report.impact_severity = severity;

    if (parsed.contains("findings") && parsed["findings"].is_array()) {
        for (const auto& item : parsed["findings"]) {
            Finding finding;
            finding.summary = item.value("summary", "");
            finding.explanation = item.value("explanation", "");
            if (!finding.summary.empty()) report.findings.push_back(std::move(finding));
        }
    }
    if (report.findings.size() > 10) {
        outcome.warnings.push_back("findings truncated to 10");
        report.findings.resize(10);
    }
    if (report.findings.size() < std::max<std::size_t>(min_findings, 1)) {
        throw Error(ErrorCode::LlmProtocolError,
                    "community report has " + std::to_string(report.findings.size()) +
                        " findings, expected at least " + std::to_string(min_findings));
    }
    return outcome;
}

std::string community_summary_text(const KnowledgeGraph& graph, const Community& community,
                                   const std::map<std::string, CommunityReport>& reports) {
    auto it = reports.find(community.community_id);
    if (it != reports.end() && !it->second.summary.empty()) return it->second.summary;

    std::ostringstream out;
    bool first = true;
    for (const auto& key : community.members) {
        if (!first) out << " ";
        first = false;
        out << key.name << ".";
        if (const Node* node = graph.find(key); node && !node->description.empty()) {
            auto line = strings::split_lines(node->description).front();
            out << " " << line;
        }
    }
    return out.str();
}

ReportOutcome summarize_community(const KnowledgeGraph& graph, const Community& community,
                                  const std::map<std::string, CommunityReport>& child_reports,
                                  std::size_t token_budget, llm::Gateway& gateway) {
    if (community.members.empty()) {
        throw Error(ErrorCode::ConfigError, "cannot summarize an empty community");
    }

    // Content items, highest priority first: sub-community summaries, then
    // member entities by degree, then intra-community edges by weight.
    std::vector<std::string> items;
    for (const auto& [child_id, report] : child_reports) {
        items.push_back("Sub-community " + child_id + " (" + report.title +
                        "): " + report.summary);
    }

    std::vector<const Node*> members;
    for (const auto& key : community.members) {
        if (const Node* node = graph.find(key)) members.push_back(node);
    }
    std::stable_sort(members.begin(), members.end(), [](const Node* a, const Node* b) {
        if (a->node_rank != b->node_rank) return a->node_rank > b->node_rank;
        return a->key < b->key;
    });
    for (const Node* node : members) {
        items.push_back("Entity " + node->key.name + " (" + node->key.entity_type + ", rank " +
                        std::to_string(node->node_rank) + "): " + node->description);
    }

    std::vector<const Edge*> intra;
    for (const auto& edge : graph.edges()) {
        if (community.members.count(edge.a) && community.members.count(edge.b)) {
            intra.push_back(&edge);
        }
    }
    std::stable_sort(intra.begin(), intra.end(), [](const Edge* a, const Edge* b) {
        if (a->weight != b->weight) return a->weight > b->weight;
        return std::make_pair(a->a, a->b) < std::make_pair(b->a, b->b);
    });
    for (const Edge* edge : intra) {
        std::ostringstream line;
        line << "Relationship " << edge->a.name << " -- " << edge->b.name << " (weight "
             << edge->weight << "): " << edge->description;
        items.push_back(line.str());
    }

    std::ostringstream data;
    std::size_t used_tokens = 0;
    std::size_t packed = 0;
    for (const auto& item : items) {
        std::size_t cost = corpus::count_tokens(item);
        if (packed > 0 && used_tokens + cost > token_budget) break;
        data << item << "\n";
        used_tokens += cost;
        ++packed;
        if (used_tokens >= token_budget) break;
    }

    const std::size_t min_findings = community.members.size() >= 5 ? 5 : 1;
    const std::string findings_range = std::to_string(min_findings) + "-10";
    std::string prompt = prompts::render_named("community_report",
                                               {{"findings_range", findings_range},
                                                {"community_data", data.str()}});

    auto response = gateway.chat(report_request(gateway, prompt));
    ReportOutcome outcome;
    try {
        outcome = parse_community_report(response.text, min_findings);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::LlmProtocolError) throw;
        // One repair attempt with the offending reply quoted back.
        std::string reminder =
            "A single JSON object: {\"title\": string, \"summary\": string, "
            "\"impact_severity\": number, \"rating_explanation\": string, "
            "\"findings\": [{\"summary\": string, \"explanation\": string}, ...]} with " +
            findings_range + " findings.";
        std::string repair = prompts::render_named(
            "verdict_repair",
            {{"previous_output", response.text}, {"format_reminder", reminder}});
        auto retry = gateway.chat(report_request(gateway, prompt + "\n\n" + repair));
        outcome = parse_community_report(retry.text, min_findings);
    }
    outcome.report.community_id = community.community_id;
    return outcome;
}

} // namespace reqcheck::graph
