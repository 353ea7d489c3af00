#pragma once

#include "reqcheck/common/labels.hpp"
#include "reqcheck/llm/gateway.hpp"
#include "reqcheck/reason/verdict.hpp"
#include "reqcheck/retrieval/graph_search.hpp"

#include <optional>
#include <string>

namespace reqcheck::reason {

struct ReasonerConfig {
    /// ToT agents run as separate LLM calls by default (checkable isolation);
    /// single-call mode keeps the one-transcript roleplay variant.
    bool tot_single_call = false;
    std::string chat_model; // empty -> gateway default
};

/// Single-shot conform/violate judgment.
Verdict check_io(const std::string& requirement, const std::string& reference,
                 llm::Gateway& gateway, const ReasonerConfig& config = {});

/// Four-stage chain: decompose, present components, compare, synthesize.
/// Stages run as one conversation; every stage output is parsed before the
/// next prompt is built. Throws UnparseableStage after one repair attempt.
Verdict cot_run(const std::string& requirement, const std::string& reference,
                llm::Gateway& gateway, const ReasonerConfig& config = {});

/// Three-stage, three-agents-plus-arbiter tree. Agents within a stage see
/// only the prior stage's arbiter output, never each other. The arbiter's
/// stated assessment is final even against a 2-1 agent majority.
Verdict tot_run(const std::string& requirement, const std::string& reference,
                llm::Gateway& gateway, const ReasonerConfig& config = {});

struct Classification {
    Label label = Label::Irrelevant;
    std::optional<Verdict> verdict; // absent when retrieval was empty
    std::string reference_text;     // the concatenated passages fed to the strategy
};

/// Empty retrieval classifies as Irrelevant without any LLM call; otherwise
/// the retrieved passages are concatenated in similarity order under labeled
/// dividers and the chosen strategy maps Conforms -> Compliant,
/// Violates -> NonCompliant.
Classification classify(const std::string& requirement_text,
                        const retrieval::RetrievalResult& retrieval, Strategy strategy,
                        llm::Gateway& gateway, const ReasonerConfig& config = {});

// Stage parsers, exposed for tests and the scripted provider fixtures.
std::optional<std::pair<Assessment, std::string>> parse_assessment(const std::string& text);
std::optional<std::pair<Breakdown, Breakdown>> parse_breakdown_pair(const std::string& text);
std::optional<ComponentAnalysis> parse_component_analysis(const std::string& text);
std::vector<std::string> split_agent_blocks(const std::string& text);

/// Concatenates retrieved passages in similarity order with labeled dividers.
std::string join_reference_passages(const retrieval::RetrievalResult& retrieval);

} // namespace reqcheck::reason
