#include "reqcheck/reason/protocols.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/sha256.hpp"
#include "reqcheck/common/strings.hpp"
#include "reqcheck/prompts/registry.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace reqcheck::reason {

using nlohmann::ordered_json;

const char* to_string(Assessment assessment) {
    return assessment == Assessment::Conforms ? "Conforms" : "Violates";
}

const char* to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::IO: return "io";
        case Strategy::CoT: return "cot";
        case Strategy::ToT: return "tot";
    }
    return "io";
}

const char* to_string(AlignmentKind alignment) {
    switch (alignment) {
        case AlignmentKind::Aligns: return "Aligns";
        case AlignmentKind::PartiallyAligns: return "PartiallyAligns";
        case AlignmentKind::Conflicts: return "Conflicts";
    }
    return "Aligns";
}

Strategy strategy_from_string(const std::string& text) {
    auto lowered = strings::to_lower(strings::trim(text));
    if (lowered == "io") return Strategy::IO;
    if (lowered == "cot") return Strategy::CoT;
    if (lowered == "tot") return Strategy::ToT;
    throw Error(ErrorCode::ConfigError, "unknown strategy: " + text);
}

namespace {

// Strips list bullets and markdown emphasis from a line prefix.
std::string strip_decor(std::string line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '-' ||
                               line[i] == '*' || line[i] == '#' || line[i] == '>')) {
        ++i;
    }
    line = line.substr(i);
    std::string out;
    for (char c : line) {
        if (c != '*') out.push_back(c);
    }
    return out;
}

// Value of the first line whose (decor-stripped) text starts with
// "<label>:", case-insensitive. Empty optional when no such line exists.
std::optional<std::string> find_labeled(const std::string& text,
                                        const std::vector<std::string>& labels) {
    for (const auto& raw_line : strings::split_lines(text)) {
        std::string line = strip_decor(raw_line);
        std::string lowered = strings::to_lower(line);
        for (const auto& label : labels) {
            std::string want = strings::to_lower(label) + ":";
            if (lowered.rfind(want, 0) == 0) {
                return strings::trim(line.substr(want.size()));
            }
        }
    }
    return std::nullopt;
}

std::string or_none(std::string value) {
    return value.empty() ? "none stated" : value;
}

std::optional<AlignmentKind> classify_alignment(const std::string& text) {
    std::string lowered = strings::to_lower(text);
    auto pos_partial = std::min(lowered.find("partially align"), lowered.find("partial align"));
    auto pos_conflict = lowered.find("conflict");
    auto pos_align = lowered.find("align");

    std::size_t best = std::string::npos;
    AlignmentKind kind = AlignmentKind::Aligns;
    if (pos_partial < best) {
        best = pos_partial;
        kind = AlignmentKind::PartiallyAligns;
    }
    if (pos_conflict < best) {
        best = pos_conflict;
        kind = AlignmentKind::Conflicts;
    }
    if (pos_align < best) {
        best = pos_align;
        kind = AlignmentKind::Aligns;
    }
    if (best == std::string::npos) return std::nullopt;
    return kind;
}

ordered_json breakdown_json(const Breakdown& breakdown) {
    ordered_json out;
    out["purpose"] = breakdown.purpose;
    out["action"] = breakdown.action;
    out["conditions"] = breakdown.conditions;
    return out;
}

ordered_json analysis_json(const ComponentAnalysis& analysis) {
    auto part = [](const ComponentAnalysis::Part& p) {
        ordered_json out;
        out["alignment"] = to_string(p.alignment);
        out["reasoning"] = p.reasoning;
        return out;
    };
    ordered_json out;
    out["purpose"] = part(analysis.purpose);
    out["action"] = part(analysis.action);
    out["conditions"] = part(analysis.conditions);
    return out;
}

// A running chat conversation against one model; accumulates turns.
class Conversation {
public:
    Conversation(llm::Gateway& gateway, const ReasonerConfig& config, std::string tag)
        : gateway_(gateway), tag_(std::move(tag)) {
        model_ = config.chat_model.empty() ? gateway.config().chat_model : config.chat_model;
    }

    std::string say(const std::string& user_prompt) {
        messages_.push_back({llm::Role::User, user_prompt});
        llm::ChatRequest request;
        request.model_name = model_;
        request.messages = messages_;
        request.max_tokens = 2048;
        request.request_tag = tag_;
        auto response = gateway_.chat(request);
        messages_.push_back({llm::Role::Assistant, response.text});
        return response.text;
    }

private:
    llm::Gateway& gateway_;
    std::string model_;
    std::string tag_;
    std::vector<llm::ChatMessage> messages_;
};

// Runs `parse` on `response`; on failure issues one repair turn and retries.
// Returns {parsed, accepted raw text}.
template <typename Parser>
auto parse_or_repair(Conversation& conversation, const std::string& response, Parser parse,
                     const std::string& format_reminder, ErrorCode code,
                     const std::string& what) {
    auto parsed = parse(response);
    if (parsed) return std::make_pair(*parsed, response);

    std::string repair = prompts::render_named(
        "verdict_repair",
        {{"previous_output", response}, {"format_reminder", format_reminder}});
    std::string retry = conversation.say(repair);
    parsed = parse(retry);
    if (!parsed) throw Error(code, what);
    return std::make_pair(*parsed, retry);
}

const char* kAssessmentReminder =
    "Assessment: [Conforms | Violates]\nExplanation: [concise explanation]";
const char* kBreakdownReminder =
    "Requirement Components:\n- Purpose: ...\n- Action: ...\n- Conditions/Constraints: ...\n"
    "Reference Text Components:\n- Purpose: ...\n- Action: ...\n- Conditions/Constraints: ...";
const char* kAnalysisReminder =
    "Purpose Analysis: ...\nAction Analysis: ...\nConditions/Constraints Analysis: ...";
const char* kOverallReminder = "Overall Assessment: [Conforms | Violates]\nRationale: ...";

std::string agent_name(std::size_t i) {
    static const char* names[3] = {"Agent A", "Agent B", "Agent C"};
    return names[i];
}

std::string arbiter_section(const std::string& text) {
    for (const char* marker :
         {"Arbiter", "Final Consolidated", "Final Output", "Overall Assessment"}) {
        // Only match at line starts so agent content cannot truncate early.
        std::size_t pos = 0;
        while ((pos = text.find(marker, pos)) != std::string::npos) {
            if (pos == 0 || text[pos - 1] == '\n') return text.substr(pos);
            ++pos;
        }
    }
    return {};
}

} // namespace

std::optional<std::pair<Assessment, std::string>> parse_assessment(const std::string& text) {
    std::optional<Assessment> assessment;
    for (const auto& raw_line : strings::split_lines(text)) {
        std::string line = strings::to_lower(strip_decor(raw_line));
        std::size_t pos = line.find("assessment:");
        if (pos == std::string::npos) continue;
        std::string value = line.substr(pos + 11);
        bool conforms = value.find("conform") != std::string::npos;
        bool violates = value.find("violat") != std::string::npos;
        if (conforms == violates) continue; // neither, or template echo with both
        assessment = conforms ? Assessment::Conforms : Assessment::Violates;
        break;
    }
    if (!assessment) return std::nullopt;

    std::string explanation;
    std::size_t label = std::string::npos;
    std::string lowered = strings::to_lower(text);
    for (const char* key : {"explanation:", "rationale:"}) {
        std::size_t pos = lowered.find(key);
        if (pos != std::string::npos && pos < label) {
            label = pos;
            explanation = strings::trim(text.substr(pos + std::string(key).size()));
        }
    }
    return std::make_pair(*assessment, explanation);
}

std::optional<std::pair<Breakdown, Breakdown>> parse_breakdown_pair(const std::string& text) {
    std::string lowered = strings::to_lower(text);
    std::size_t req_start = lowered.find("requirement components");
    std::size_t ref_start = lowered.find("reference text components");
    if (ref_start == std::string::npos) ref_start = lowered.find("reference components");
    if (req_start == std::string::npos || ref_start == std::string::npos ||
        ref_start <= req_start) {
        return std::nullopt;
    }

    auto parse_one = [](const std::string& region) -> std::optional<Breakdown> {
        auto purpose = find_labeled(region, {"Purpose"});
        auto action = find_labeled(region, {"Action"});
        auto conditions = find_labeled(region, {"Conditions/Constraints", "Conditions"});
        if (!purpose || !action || !conditions) return std::nullopt;
        return Breakdown{or_none(*purpose), or_none(*action), or_none(*conditions)};
    };

    auto requirement = parse_one(text.substr(req_start, ref_start - req_start));
    auto reference = parse_one(text.substr(ref_start));
    if (!requirement || !reference) return std::nullopt;
    return std::make_pair(*requirement, *reference);
}

std::optional<ComponentAnalysis> parse_component_analysis(const std::string& text) {
    auto purpose = find_labeled(text, {"Purpose Analysis"});
    auto action = find_labeled(text, {"Action Analysis"});
    auto conditions =
        find_labeled(text, {"Conditions/Constraints Analysis", "Conditions Analysis"});
    if (!purpose || !action || !conditions) return std::nullopt;

    ComponentAnalysis analysis;
    auto fill = [](ComponentAnalysis::Part& part, const std::string& value)
        -> bool {
        auto kind = classify_alignment(value);
        if (!kind) return false;
        part.alignment = *kind;
        part.reasoning = value;
        return true;
    };
    if (!fill(analysis.purpose, *purpose) || !fill(analysis.action, *action) ||
        !fill(analysis.conditions, *conditions)) {
        return std::nullopt;
    }
    return analysis;
}

std::vector<std::string> split_agent_blocks(const std::string& text) {
    struct Marker {
        std::size_t pos;
        bool is_agent;
    };
    std::vector<Marker> markers;
    std::size_t offset = 0;
    for (const auto& raw_line : strings::split_lines(text)) {
        std::string line = strip_decor(raw_line);
        if (line.rfind("Agent ", 0) == 0) {
            markers.push_back({offset, true});
        } else if (line.rfind("Arbiter", 0) == 0 || line.rfind("Final Consolidated", 0) == 0 ||
                   line.rfind("Final Output", 0) == 0) {
            markers.push_back({offset, false});
        }
        offset += raw_line.size() + 1;
    }

    std::vector<std::string> blocks;
    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (!markers[i].is_agent) continue;
        std::size_t end = text.size();
        if (i + 1 < markers.size()) end = markers[i + 1].pos;
        blocks.push_back(strings::trim(text.substr(markers[i].pos, end - markers[i].pos)));
    }
    return blocks;
}

std::string join_reference_passages(const retrieval::RetrievalResult& retrieval) {
    std::string out;
    for (std::size_t i = 0; i < retrieval.items.size(); ++i) {
        char header[64];
        std::snprintf(header, sizeof(header), "Passage %zu (similarity %.3f):\n", i + 1,
                      retrieval.items[i].similarity);
        if (i > 0) out += "\n\n";
        out += header;
        out += retrieval.items[i].text;
    }
    return out;
}

Verdict check_io(const std::string& requirement, const std::string& reference,
                 llm::Gateway& gateway, const ReasonerConfig& config) {
    if (reference.empty()) {
        throw Error(ErrorCode::ConfigError, "IO check requires non-empty reference text");
    }
    Conversation conversation(gateway, config, "reason-io");
    std::string prompt = prompts::render_named(
        "io", {{"requirement", requirement}, {"reference_text", reference}});
    auto outcome =
        parse_or_repair(conversation, conversation.say(prompt), parse_assessment,
                        kAssessmentReminder, ErrorCode::UnparseableVerdict,
                        "IO verdict unparseable");

    Verdict verdict;
    verdict.assessment = outcome.first.first;
    verdict.explanation = outcome.first.second;
    verdict.strategy = Strategy::IO;
    ordered_json parsed;
    parsed["assessment"] = to_string(verdict.assessment);
    parsed["explanation"] = verdict.explanation;
    verdict.trace.push_back({"io", Sha256::hex(prompt), parsed.dump()});
    return verdict;
}

Verdict cot_run(const std::string& requirement, const std::string& reference,
                llm::Gateway& gateway, const ReasonerConfig& config) {
    if (reference.empty()) {
        throw Error(ErrorCode::ConfigError, "CoT run requires non-empty reference text");
    }
    Conversation conversation(gateway, config, "reason-cot");
    Verdict verdict;
    verdict.strategy = Strategy::CoT;

    // Stage 1: decompose both texts.
    std::string prompt1 = prompts::render_named(
        "cot_1", {{"requirement", requirement}, {"reference_text", reference}});
    auto [pair1, raw1] = parse_or_repair(conversation, conversation.say(prompt1),
                                         parse_breakdown_pair, kBreakdownReminder,
                                         ErrorCode::UnparseableStage, "stage 1: breakdown");
    {
        ordered_json parsed;
        parsed["requirement"] = breakdown_json(pair1.first);
        parsed["reference"] = breakdown_json(pair1.second);
        verdict.trace.push_back({"cot-breakdown", Sha256::hex(prompt1), parsed.dump()});
    }

    // Stage 2: present the extracted components back for confirmation.
    std::string prompt2 = prompts::render_named(
        "cot_2", {{"requirement_purpose", pair1.first.purpose},
                  {"requirement_action", pair1.first.action},
                  {"requirement_conditions", pair1.first.conditions},
                  {"reference_purpose", pair1.second.purpose},
                  {"reference_action", pair1.second.action},
                  {"reference_conditions", pair1.second.conditions}});
    auto [pair2, raw2] = parse_or_repair(conversation, conversation.say(prompt2),
                                         parse_breakdown_pair, kBreakdownReminder,
                                         ErrorCode::UnparseableStage, "stage 2: components");
    {
        ordered_json parsed;
        parsed["requirement"] = breakdown_json(pair2.first);
        parsed["reference"] = breakdown_json(pair2.second);
        verdict.trace.push_back({"cot-components", Sha256::hex(prompt2), parsed.dump()});
    }

    // Stage 3: compare component vs component.
    std::string prompt3 = prompts::get("cot_3");
    auto [analysis, raw3] = parse_or_repair(conversation, conversation.say(prompt3),
                                            parse_component_analysis, kAnalysisReminder,
                                            ErrorCode::UnparseableStage, "stage 3: comparison");
    verdict.trace.push_back({"cot-compare", Sha256::hex(prompt3), analysis_json(analysis).dump()});

    // Stage 4: synthesize the overall assessment (IO output format).
    std::string prompt4 = prompts::get("cot_synthesis");
    auto [assessment, raw4] = parse_or_repair(conversation, conversation.say(prompt4),
                                              parse_assessment, kAssessmentReminder,
                                              ErrorCode::UnparseableStage, "stage 4: synthesis");
    verdict.assessment = assessment.first;
    verdict.explanation = assessment.second;
    {
        ordered_json parsed;
        parsed["assessment"] = to_string(verdict.assessment);
        parsed["explanation"] = verdict.explanation;
        verdict.trace.push_back({"cot-synthesis", Sha256::hex(prompt4), parsed.dump()});
    }
    return verdict;
}

namespace {

struct TotStageResult {
    AgentSet agents;
    std::string prompt_hash;
};

// Runs one ToT stage in separate-call mode: three isolated agent calls (each
// seeing only `agent_template` with prior-stage arbiter content), then one
// arbiter call over the joined agent outputs.
template <typename AgentParser, typename ArbiterParser>
TotStageResult run_tot_stage(llm::Gateway& gateway, const ReasonerConfig& config,
                             const std::string& stage_tag, const std::string& agent_template,
                             const std::string& arbiter_template,
                             std::map<std::string, std::string> values, AgentParser agent_parse,
                             const char* agent_reminder, ArbiterParser arbiter_parse,
                             const char* arbiter_reminder, int stage_number) {
    TotStageResult result;
    Sha256 stage_hash;
    std::vector<std::string> agent_texts;

    for (std::size_t i = 0; i < 3; ++i) {
        auto agent_values = values;
        agent_values["agent_name"] = agent_name(i);
        std::string prompt = prompts::render(agent_template, agent_values);
        stage_hash.update(prompt);
        Conversation conversation(gateway, config, stage_tag + "-agent");
        auto [parsed, raw] = parse_or_repair(
            conversation, conversation.say(prompt), agent_parse, agent_reminder,
            ErrorCode::UnparseableStage,
            "stage " + std::to_string(stage_number) + ": " + agent_name(i));
        (void)parsed;
        result.agents.agent_outputs[i] = raw;
        agent_texts.push_back(raw);
    }

    auto arbiter_values = values;
    arbiter_values["agent_outputs"] = strings::join(agent_texts, "\n\n");
    std::string arbiter_prompt = prompts::render(arbiter_template, arbiter_values);
    stage_hash.update(arbiter_prompt);
    Conversation conversation(gateway, config, stage_tag + "-arbiter");
    auto [parsed, raw] = parse_or_repair(
        conversation, conversation.say(arbiter_prompt), arbiter_parse, arbiter_reminder,
        ErrorCode::UnparseableStage,
        "stage " + std::to_string(stage_number) + ": arbiter");
    (void)parsed;
    result.agents.arbiter_output = raw;

    auto digest = stage_hash.digest();
    static const char* hex_digits = "0123456789abcdef";
    result.prompt_hash.reserve(64);
    for (auto byte : digest) {
        result.prompt_hash.push_back(hex_digits[byte >> 4]);
        result.prompt_hash.push_back(hex_digits[byte & 0xf]);
    }
    return result;
}

// Single-call mode: one roleplay transcript per stage. The reply must hold
// exactly three agent blocks plus an arbiter section.
template <typename ArbiterParser>
TotStageResult run_tot_stage_single(llm::Gateway& gateway, const ReasonerConfig& config,
                                    const std::string& stage_tag,
                                    const std::string& template_name,
                                    const std::map<std::string, std::string>& values,
                                    ArbiterParser arbiter_parse, const char* arbiter_reminder,
                                    int stage_number) {
    TotStageResult result;
    std::string prompt = prompts::render_named(template_name, values);
    result.prompt_hash = Sha256::hex(prompt);
    Conversation conversation(gateway, config, stage_tag);
    std::string response = conversation.say(prompt);

    auto blocks = split_agent_blocks(response);
    if (blocks.size() != 3) {
        throw Error(ErrorCode::AgentCountMismatch,
                    "stage " + std::to_string(stage_number) + ": expected 3 agent blocks, got " +
                        std::to_string(blocks.size()));
    }
    for (std::size_t i = 0; i < 3; ++i) result.agents.agent_outputs[i] = blocks[i];

    std::string arbiter = arbiter_section(response);
    auto [parsed, raw] = parse_or_repair(
        conversation, arbiter.empty() ? response : arbiter, arbiter_parse, arbiter_reminder,
        ErrorCode::UnparseableStage, "stage " + std::to_string(stage_number) + ": arbiter");
    (void)parsed;
    result.agents.arbiter_output = raw;
    return result;
}

ordered_json agents_json(const AgentSet& agents) {
    ordered_json out;
    out["agent_a"] = agents.agent_outputs[0];
    out["agent_b"] = agents.agent_outputs[1];
    out["agent_c"] = agents.agent_outputs[2];
    out["arbiter"] = agents.arbiter_output;
    return out;
}

} // namespace

Verdict tot_run(const std::string& requirement, const std::string& reference,
                llm::Gateway& gateway, const ReasonerConfig& config) {
    if (reference.empty()) {
        throw Error(ErrorCode::ConfigError, "ToT run requires non-empty reference text");
    }
    Verdict verdict;
    verdict.strategy = Strategy::ToT;

    const std::map<std::string, std::string> stage1_values = {
        {"requirement", requirement}, {"reference_text", reference}};

    TotStageResult stage1 =
        config.tot_single_call
            ? run_tot_stage_single(gateway, config, "reason-tot-1", "tot_1", stage1_values,
                                   parse_breakdown_pair, kBreakdownReminder, 1)
            : run_tot_stage(gateway, config, "reason-tot-1", prompts::get("tot_1_agent"),
                            prompts::get("tot_1_arbiter"), stage1_values, parse_breakdown_pair,
                            kBreakdownReminder, parse_breakdown_pair, kBreakdownReminder, 1);
    verdict.trace.push_back(
        {"tot-breakdown", stage1.prompt_hash, agents_json(stage1.agents).dump()});

    const std::map<std::string, std::string> stage2_values = {
        {"final_consolidated_breakdown", stage1.agents.arbiter_output}};
    TotStageResult stage2 =
        config.tot_single_call
            ? run_tot_stage_single(gateway, config, "reason-tot-2", "tot_2", stage2_values,
                                   parse_component_analysis, kAnalysisReminder, 2)
            : run_tot_stage(gateway, config, "reason-tot-2", prompts::get("tot_2_agent"),
                            prompts::get("tot_2_arbiter"), stage2_values,
                            parse_component_analysis, kAnalysisReminder,
                            parse_component_analysis, kAnalysisReminder, 2);
    verdict.trace.push_back(
        {"tot-analysis", stage2.prompt_hash, agents_json(stage2.agents).dump()});

    const std::map<std::string, std::string> stage3_values = {
        {"consolidated_analysis", stage2.agents.arbiter_output}};
    TotStageResult stage3 =
        config.tot_single_call
            ? run_tot_stage_single(gateway, config, "reason-tot-3", "tot_3", stage3_values,
                                   parse_assessment, kOverallReminder, 3)
            : run_tot_stage(gateway, config, "reason-tot-3", prompts::get("tot_3_agent"),
                            prompts::get("tot_3_arbiter"), stage3_values, parse_assessment,
                            kOverallReminder, parse_assessment, kOverallReminder, 3);

    // The arbiter has synthesis authority: its stated assessment is final.
    auto final_assessment = parse_assessment(stage3.agents.arbiter_output);
    verdict.assessment = final_assessment->first;
    verdict.explanation = final_assessment->second;
    verdict.trace.push_back(
        {"tot-assessment", stage3.prompt_hash, agents_json(stage3.agents).dump()});
    return verdict;
}

Classification classify(const std::string& requirement_text,
                        const retrieval::RetrievalResult& retrieval, Strategy strategy,
                        llm::Gateway& gateway, const ReasonerConfig& config) {
    Classification out;
    if (retrieval.items.empty()) {
        out.label = Label::Irrelevant; // no traceable reference: no LLM call
        return out;
    }

    out.reference_text = join_reference_passages(retrieval);
    Verdict verdict;
    switch (strategy) {
        case Strategy::IO:
            verdict = check_io(requirement_text, out.reference_text, gateway, config);
            break;
        case Strategy::CoT:
            verdict = cot_run(requirement_text, out.reference_text, gateway, config);
            break;
        case Strategy::ToT:
            verdict = tot_run(requirement_text, out.reference_text, gateway, config);
            break;
    }
    out.label = verdict.assessment == Assessment::Conforms ? Label::Compliant
                                                           : Label::NonCompliant;
    out.verdict = std::move(verdict);
    return out;
}

} // namespace reqcheck::reason
