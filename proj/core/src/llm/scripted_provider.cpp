#include "reqcheck/llm/scripted_provider.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/sha256.hpp"
#include "reqcheck/common/strings.hpp"
#include "reqcheck/corpus/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace reqcheck::llm {

namespace {

using strings::to_lower;
using strings::trim;

// ---------------------------------------------------------------------------
// Prompt slicing

std::string section(const std::string& text, const std::string& start_marker,
                    const std::vector<std::string>& end_markers) {
    std::size_t start = text.find(start_marker);
    if (start == std::string::npos) return {};
    start += start_marker.size();
    std::size_t end = text.size();
    for (const auto& marker : end_markers) {
        std::size_t pos = text.find(marker, start);
        if (pos != std::string::npos) end = std::min(end, pos);
    }
    return trim(text.substr(start, end - start));
}

const std::vector<std::string> kAfterReference = {
    "\n\nAssess whether", "\n\nBreak down",          "\n\nFormat for",
    "\n\nProvide a breakdown", "\n\nAgent Breakdowns:", "\n\nInstructions",
    "\n\nSteps:"};

std::string requirement_of(const std::string& prompt) {
    return section(prompt, "Requirement:", {"\nReference Text:"});
}

std::string reference_of(const std::string& prompt) {
    return section(prompt, "Reference Text:", kAfterReference);
}

// ---------------------------------------------------------------------------
// Numeric comparison: ids like 3.1.6 (two or more dots) are clause labels,
// plain numbers and one-dot decimals are values.

std::set<std::string> value_numbers(const std::string& text) {
    std::set<std::string> numbers;
    for (const auto& token : corpus::tokenize(text)) {
        if (token.empty() || !std::isdigit(static_cast<unsigned char>(token[0]))) continue;
        const std::size_t dots = std::count(token.begin(), token.end(), '.');
        if (dots >= 2) continue;
        bool numeric = std::all_of(token.begin(), token.end(), [](unsigned char c) {
            return std::isdigit(c) != 0 || c == '.';
        });
        if (numeric) numbers.insert(token);
    }
    return numbers;
}

struct NumericDiff {
    std::set<std::string> requirement_only;
    std::set<std::string> reference_only;
    bool conflicting = false;
};

NumericDiff numeric_diff(const std::string& requirement, const std::string& reference) {
    NumericDiff diff;
    auto req = value_numbers(requirement);
    auto ref = value_numbers(reference);
    std::set_difference(req.begin(), req.end(), ref.begin(), ref.end(),
                        std::inserter(diff.requirement_only, diff.requirement_only.begin()));
    std::set_difference(ref.begin(), ref.end(), req.begin(), req.end(),
                        std::inserter(diff.reference_only, diff.reference_only.begin()));
    diff.conflicting = !diff.requirement_only.empty() && !diff.reference_only.empty();
    return diff;
}

std::string join_set(const std::set<std::string>& values) {
    std::vector<std::string> v(values.begin(), values.end());
    return strings::join(v, ", ");
}

// ---------------------------------------------------------------------------
// Breakdown rendering

std::string first_words(const std::string& text, std::size_t count) {
    auto tokens = corpus::tokenize(text);
    std::vector<std::string> keep;
    for (const auto& token : tokens) {
        if (keep.size() >= count) break;
        keep.push_back(token);
    }
    return strings::join(keep, " ");
}

std::string breakdown_block(const char* header, const std::string& text) {
    auto numbers = value_numbers(text);
    std::ostringstream out;
    out << header << "\n";
    out << "- Purpose: Ensure that " << to_lower(first_words(text, 6)) << ".\n";
    out << "- Action: " << first_words(text, 12) << ".\n";
    out << "- Conditions/Constraints: "
        << (numbers.empty() ? std::string("none stated")
                            : "numeric constraints " + join_set(numbers))
        << "\n";
    return out.str();
}

std::string breakdown_pair_text(const std::string& requirement, const std::string& reference) {
    return breakdown_block("Requirement Components:", requirement) +
           breakdown_block("Reference Text Components:", reference);
}

// Mines the requirement/reference component regions out of an earlier
// breakdown (for comparison stages, where the raw texts are gone).
NumericDiff diff_from_components(const std::string& components_text) {
    std::string lowered = to_lower(components_text);
    std::size_t req = lowered.find("requirement components");
    std::size_t ref = lowered.find("reference text components");
    if (req == std::string::npos || ref == std::string::npos || ref <= req) {
        return {};
    }
    return numeric_diff(components_text.substr(req, ref - req), components_text.substr(ref));
}

std::string analysis_text(const NumericDiff& diff) {
    std::ostringstream out;
    out << "Purpose Analysis: Aligns. The stated objectives pursue the same goal.\n";
    out << "Action Analysis: Aligns. The described processes are consistent.\n";
    if (diff.conflicting) {
        out << "Conditions/Constraints Analysis: Conflicts. The requirement specifies "
            << join_set(diff.requirement_only) << " while the reference specifies "
            << join_set(diff.reference_only) << ".\n";
    } else {
        out << "Conditions/Constraints Analysis: Aligns. The stated constraints are "
               "consistent with the reference.\n";
    }
    return out.str();
}

std::string assessment_text(bool violates, const NumericDiff& diff, const char* label,
                            const char* explanation_key) {
    std::ostringstream out;
    if (violates) {
        out << label << ": Violates\n"
            << explanation_key << ": The requirement states " << join_set(diff.requirement_only)
            << " where the reference mandates " << join_set(diff.reference_only) << ".";
    } else {
        out << label << ": Conforms\n"
            << explanation_key
            << ": The requirement is consistent with the cited reference provisions.";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Extraction scripting

struct ScriptedRecord {
    std::string text;
};

std::string escape_quotes(std::string text) {
    // Record fields are quote-wrapped; drop embedded quotes for cleanliness.
    text.erase(std::remove(text.begin(), text.end(), '"'), text.end());
    return text;
}

std::string entity_record(const std::string& name, const std::string& type,
                          const std::string& description) {
    return "(\"entity\"<|>\"" + escape_quotes(name) + "\"<|>\"" + type + "\"<|>\"" +
           escape_quotes(description) + "\")";
}

std::string relation_record(const std::string& source, const std::string& target,
                            const std::string& description, int strength) {
    return "(\"relationship\"<|>\"" + escape_quotes(source) + "\"<|>\"" +
           escape_quotes(target) + "\"<|>\"" + escape_quotes(description) + "\"<|>\"" +
           std::to_string(strength) + "\")";
}

std::string clip(const std::string& text, std::size_t max_chars = 200) {
    if (text.size() <= max_chars) return text;
    return text.substr(0, max_chars);
}

std::string extraction_response(const std::string& chunk_text) {
    std::vector<std::string> records;
    std::set<std::string> emitted_entities;

    auto add_entity = [&](const std::string& name, const std::string& type,
                          const std::string& description) {
        if (emitted_entities.insert(name).second) {
            records.push_back(entity_record(name, type, description));
        }
    };

    // ARTICLE n mentions, in order of first occurrence.
    std::vector<std::string> articles;
    {
        static const std::regex article_re(R"(ARTICLE\s+(\d+))");
        auto begin = std::sregex_iterator(chunk_text.begin(), chunk_text.end(), article_re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            std::string name = "ARTICLE " + (*it)[1].str();
            if (std::find(articles.begin(), articles.end(), name) == articles.end()) {
                articles.push_back(name);
            }
        }
    }

    // Clause ids like (3.1.6), with the containing line as description.
    static const std::regex clause_re(R"(\((\d+(?:\.\d+)+)\))");
    std::vector<std::pair<std::string, std::string>> clauses; // id, line
    std::set<std::string> sections;
    std::map<std::string, std::set<std::string>> acronyms_by_line;

    for (const auto& line : strings::split_lines(chunk_text)) {
        std::smatch match;
        std::string rest = line;
        std::string clause_of_line;
        if (std::regex_search(rest, match, clause_re)) {
            std::string id = match[1].str();
            if (std::none_of(clauses.begin(), clauses.end(),
                             [&](const auto& c) { return c.first == id; })) {
                clauses.emplace_back(id, trim(line));
            }
            clause_of_line = id;
            auto first_dot = id.find('.');
            auto second_dot = id.find('.', first_dot + 1);
            if (second_dot != std::string::npos) {
                sections.insert(id.substr(0, second_dot));
            }
        }
        // Uppercase acronyms on this line.
        for (const auto& token : corpus::tokenize(line)) {
            if (token.size() < 2 || token.size() > 6) continue;
            if (token == "ARTICLE") continue;
            bool upper = std::all_of(token.begin(), token.end(), [](unsigned char c) {
                return std::isupper(c) != 0;
            });
            if (upper && !clause_of_line.empty()) {
                acronyms_by_line[clause_of_line].insert(token);
            }
        }
    }

    for (const auto& article : articles) {
        add_entity(article, "article",
                   "Regulatory article cited in the reference text: " + article + ".");
    }
    for (std::size_t i = 0; i + 1 < articles.size(); ++i) {
        records.push_back(relation_record(articles[i], articles[i + 1],
                                          "provides additional mandates related to", 8));
    }

    for (const auto& [id, line] : clauses) {
        add_entity("CLAUSE " + id, "article", clip(line));
    }
    for (const auto& section_id : sections) {
        add_entity("SECTION " + section_id, "article",
                   "Section " + section_id + " of the reference standard.");
    }
    for (const auto& [id, line] : clauses) {
        auto first_dot = id.find('.');
        auto second_dot = id.find('.', first_dot + 1);
        if (second_dot != std::string::npos) {
            records.push_back(relation_record("CLAUSE " + id,
                                              "SECTION " + id.substr(0, second_dot),
                                              "belongs to section", 6));
        }
    }
    for (std::size_t i = 0; i + 1 < clauses.size(); ++i) {
        records.push_back(relation_record("CLAUSE " + clauses[i].first,
                                          "CLAUSE " + clauses[i + 1].first,
                                          "adjacent provisions", 5));
    }
    for (const auto& [clause_id, acronyms] : acronyms_by_line) {
        for (const auto& acronym : acronyms) {
            add_entity(acronym, "standard",
                       "Domain term " + acronym + " used by the reference provisions.");
            records.push_back(
                relation_record("CLAUSE " + clause_id, acronym, "references term", 7));
        }
    }

    if (records.empty()) return "<|COMPLETE|>";
    return strings::join(records, "##\n") + "\n<|COMPLETE|>";
}

// ---------------------------------------------------------------------------
// Community report scripting

std::string community_report_response(const std::string& prompt) {
    std::string data = section(prompt, "Community data:", {"\n\nOutput:"});
    std::vector<std::pair<std::string, std::string>> entities; // name, description
    for (const auto& line : strings::split_lines(data)) {
        if (line.rfind("Entity ", 0) != 0) continue;
        std::size_t paren = line.find(" (");
        std::size_t colon = line.find("): ");
        if (paren == std::string::npos || colon == std::string::npos) continue;
        entities.emplace_back(line.substr(7, paren - 7), line.substr(colon + 3));
    }

    nlohmann::ordered_json report;
    std::string title = "Community";
    if (!entities.empty()) {
        title = "Community of " + entities.front().first;
        if (entities.size() > 1) {
            title += " and " + std::to_string(entities.size() - 1) + " related elements";
        }
    }
    report["title"] = title;

    std::ostringstream summary;
    summary << "This community groups " << entities.size()
            << " interconnected elements of the reference corpus.";
    for (const auto& [name, description] : entities) {
        summary << " " << description;
    }
    report["summary"] = clip(summary.str(), 2000);
    report["impact_severity"] =
        std::min(10.0, 2.0 + static_cast<double>(entities.size()));
    report["rating_explanation"] =
        "Severity reflects the number of interconnected provisions and terms.";

    nlohmann::ordered_json findings = nlohmann::ordered_json::array();
    for (const auto& [name, description] : entities) {
        if (findings.size() == 10) break;
        findings.push_back({{"summary", name + " is central to this community"},
                            {"explanation", description}});
    }
    if (findings.empty()) {
        findings.push_back({{"summary", "Community without resolvable entities"},
                            {"explanation", "No entity data was supplied in the prompt."}});
    }
    report["findings"] = std::move(findings);
    return report.dump(2);
}

// ---------------------------------------------------------------------------
// Conversation mining

std::string last_assistant_content(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == Role::Assistant) return it->content;
    }
    return {};
}

std::string agent_name_of(const std::string& prompt) {
    for (const char* name : {"Agent A", "Agent B", "Agent C"}) {
        if (prompt.find(std::string("You are ") + name + ".") != std::string::npos) return name;
    }
    return "Agent A";
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace

std::vector<EmbeddingVector> ScriptedProvider::embed(const std::string& model_name,
                                                     const std::vector<std::string>& texts) {
    (void)model_name;
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        EmbeddingVector vec;
        vec.values.assign(kDimension, 0.0);
        bool any = false;
        for (const auto& token : corpus::tokenize(text)) {
            if (corpus::is_stopword(token)) continue;
            bool has_alnum = std::any_of(token.begin(), token.end(), [](unsigned char c) {
                return std::isalnum(c) != 0;
            });
            if (!has_alnum) continue;
            auto digest = [&] {
                Sha256 h;
                h.update(to_lower(token));
                return h.digest();
            }();
            std::uint64_t value = 0;
            for (int i = 0; i < 8; ++i) value = (value << 8) | digest[i];
            const std::size_t index = value % kDimension;
            const double sign = (value >> 63) ? 1.0 : -1.0;
            vec.values[index] += sign;
            any = true;
        }
        if (!any) {
            // Degenerate text: deterministic unit basis vector.
            auto digest = [&] {
                Sha256 h;
                h.update(text);
                return h.digest();
            }();
            vec.values[digest[0] % kDimension] = 1.0;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

ChatResponse ScriptedProvider::chat(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw Error(ErrorCode::ProviderError, "scripted provider: empty message list");
    }
    const std::string& prompt = request.messages.back().content;
    auto has = [&](const char* marker) { return prompt.find(marker) != std::string::npos; };

    std::string text;

    const bool single_call = has("1. Agent A: Provide your");

    if (has("Given a text document relevant to software requirements")) {
        text = extraction_response(section(prompt, "Text:\n", {"\n\nOutput:"}));
    } else if (has("were missed in the last extraction")) {
        std::string chunk = section(prompt, "Text:\n", {"\n\nOutput:"});
        if (chunk.find("GLEANME") != std::string::npos) {
            text = entity_record("GLEANED PROVISION", "standard",
                                 "Provision recovered in a gleaning round.") +
                   "\n<|COMPLETE|>";
        } else {
            text = "<|COMPLETE|>";
        }
    } else if (has("Summarize the following descriptions of the graph element")) {
        std::string name = section(prompt, "graph element \"", {"\""});
        std::string descriptions = section(prompt, "Descriptions:", {"\n\nSummary:"});
        std::string first_line;
        for (const auto& line : strings::split_lines(descriptions)) {
            auto trimmed = trim(line);
            if (trimmed.empty()) continue;
            std::size_t dot = trimmed.find(". ");
            first_line = dot != std::string::npos && dot < 4 ? trimmed.substr(dot + 2) : trimmed;
            break;
        }
        int count = 0;
        for (const auto& line : strings::split_lines(descriptions)) {
            if (!trim(line).empty()) ++count;
        }
        text = name + ": " + first_line + " (consolidated from " + std::to_string(count) +
               " descriptions).";
    } else if (has("Generate a report on a software requirements community")) {
        text = community_report_response(prompt);
    } else if (single_call) {
        // Single-call roleplay transcript, all agents plus arbiter at once.
        std::string requirement = requirement_of(prompt);
        std::string reference = reference_of(prompt);
        if (has("break down the given requirement")) {
            std::string pair = breakdown_pair_text(requirement, reference);
            std::ostringstream out;
            for (const char* name : {"Agent A", "Agent B", "Agent C"}) {
                out << name << " Analysis:\n" << pair << "\n";
            }
            out << "Final Consolidated Components:\n" << pair;
            text = out.str();
        } else if (has("aligns, partially aligns, or conflicts")) {
            auto diff = diff_from_components(section(prompt, "Consolidated Breakdown:",
                                                     {"\n\nInstructions"}));
            std::string analysis = analysis_text(diff);
            std::ostringstream out;
            for (const char* name : {"Agent A", "Agent B", "Agent C"}) {
                out << name << " Analysis:\n" << analysis << "\n";
            }
            out << "Arbiter's Consolidated Analysis:\n" << analysis;
            text = out.str();
        } else {
            std::string consolidated =
                section(prompt, "Consolidated Analysis:", {"\n\nInstructions"});
            bool violates = consolidated.find("Conflicts") != std::string::npos;
            NumericDiff empty_diff;
            std::ostringstream out;
            for (const char* name : {"Agent A", "Agent B", "Agent C"}) {
                out << name << " Final Assessment:\n"
                    << (violates ? "Overall Assessment: Violates\nRationale: The consolidated "
                                   "analysis reports conflicting conditions."
                                 : "Overall Assessment: Conforms\nRationale: All components "
                                   "align per the consolidated analysis.")
                    << "\n";
            }
            out << "Arbiter's Conclusion:\n"
                << (violates ? "Overall Assessment: Violates\nRationale: The agents agree the "
                               "conditions conflict with the reference."
                             : "Overall Assessment: Conforms\nRationale: The agents agree the "
                               "requirement aligns with the reference.");
            text = out.str();
        }
    } else if (has("Produce a final, consolidated breakdown")) {
        // ToT stage-1 arbiter (separate-call mode).
        text = "Final Consolidated Components:\n" +
               breakdown_pair_text(requirement_of(prompt), reference_of(prompt));
    } else if (has("Produce a final, synthesized analysis")) {
        // ToT stage-2 arbiter: synthesize from the consolidated breakdown.
        auto consolidated = section(prompt, "Consolidated Breakdown:", {"\n\nAgent Analyses:"});
        text = analysis_text(diff_from_components(consolidated));
    } else if (has("Produce a final determination and rationale")) {
        // ToT stage-3 arbiter: majority vote across agent assessments.
        std::string agents = section(prompt, "Agent Assessments:", {"\n\nArbiter"});
        int violates = count_occurrences(agents, "Overall Assessment: Violates");
        int conforms = count_occurrences(agents, "Overall Assessment: Conforms");
        if (violates > conforms) {
            text = "Overall Assessment: Violates\nRationale: The majority of agents found "
                   "conflicting conditions, and their reasoning is best supported by the "
                   "consolidated analysis.";
        } else {
            text = "Overall Assessment: Conforms\nRationale: The majority of agents found the "
                   "requirement consistent with the reference.";
        }
    } else if (has("Your goal is to break down the given requirement")) {
        // ToT stage-1 agent.
        text = agent_name_of(prompt) + " Analysis:\n" +
               breakdown_pair_text(requirement_of(prompt), reference_of(prompt));
    } else if (has("Independently analyze how the Purpose")) {
        // ToT stage-2 agent.
        auto diff = diff_from_components(
            section(prompt, "Consolidated Breakdown:", {"\n\nIndependently analyze"}));
        text = agent_name_of(prompt) + " Analysis:\n" + analysis_text(diff);
    } else if (has("Independently determine whether the requirement overall")) {
        // ToT stage-3 agent.
        std::string consolidated =
            section(prompt, "Consolidated Analysis:", {"\n\nIndependently determine"});
        bool violates = consolidated.find("Conflicts") != std::string::npos;
        text = agent_name_of(prompt) + " Final Assessment:\n" +
               (violates ? "Overall Assessment: Violates\nRationale: The consolidated analysis "
                           "reports a conditions conflict with the reference."
                         : "Overall Assessment: Conforms\nRationale: The consolidated analysis "
                           "reports alignment on all components.");
    } else if (has("Break down the components of the requirement")) {
        // CoT stage 1.
        text = breakdown_pair_text(requirement_of(prompt), reference_of(prompt));
    } else if (has("The following are the extracted components")) {
        // CoT stage 2: restate the presented components.
        text = section(prompt, "The following are the extracted components of the requirement "
                               "and the reference text:\n",
                       {"\n\nRestate"});
    } else if (has("Compare the corresponding components")) {
        // CoT stage 3: mine the stage-2 echo from the conversation.
        text = analysis_text(diff_from_components(last_assistant_content(request)));
    } else if (has("synthesize an overall assessment")) {
        // CoT stage 4.
        std::string analysis = last_assistant_content(request);
        bool violates = analysis.find("Conflicts") != std::string::npos;
        NumericDiff diff;
        if (violates) {
            diff.requirement_only.insert("(conflicting conditions)");
            diff.reference_only.insert("(see component analysis)");
            diff.conflicting = true;
        }
        text = assessment_text(violates, diff, "Assessment", "Explanation");
    } else if (has("Assess whether the requirement aligns with the reference text")) {
        // IO prompt.
        auto diff = numeric_diff(requirement_of(prompt), reference_of(prompt));
        text = assessment_text(diff.conflicting, diff, "Assessment", "Explanation");
    } else {
        throw Error(ErrorCode::ProviderError,
                    "scripted provider: unrecognized prompt: " + clip(prompt, 120));
    }

    ChatResponse response;
    response.text = std::move(text);
    std::size_t prompt_tokens = 0;
    for (const auto& message : request.messages) {
        prompt_tokens += corpus::count_tokens(message.content);
    }
    response.usage.prompt_tokens = prompt_tokens;
    response.usage.completion_tokens = corpus::count_tokens(response.text);
    response.provider_id = id();
    return response;
}

} // namespace reqcheck::llm
