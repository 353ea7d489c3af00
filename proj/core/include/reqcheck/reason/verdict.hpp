#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace reqcheck::reason {

enum class Assessment { Conforms, Violates };
enum class Strategy { IO, CoT, ToT };
enum class AlignmentKind { Aligns, PartiallyAligns, Conflicts };

const char* to_string(Assessment assessment);
const char* to_string(Strategy strategy);
const char* to_string(AlignmentKind alignment);
Strategy strategy_from_string(const std::string& text);

/// Purpose / Action / Conditions decomposition of one text. Fields are always
/// present ("none stated" when the text gives nothing).
struct Breakdown {
    std::string purpose;
    std::string action;
    std::string conditions;
};

struct ComponentAnalysis {
    struct Part {
        AlignmentKind alignment = AlignmentKind::Aligns;
        std::string reasoning;
    };
    Part purpose;
    Part action;
    Part conditions;
};

/// Exactly three agent outputs (A, B, C) preceding one arbiter output.
struct AgentSet {
    std::array<std::string, 3> agent_outputs;
    std::string arbiter_output;
};

struct TraceEntry {
    std::string stage;
    std::string prompt_sha256; // hash of the prompt(s) issued for this stage
    std::string parsed_output; // JSON rendering of the parsed stage output
};

struct Verdict {
    Assessment assessment = Assessment::Conforms;
    std::string explanation;
    Strategy strategy = Strategy::IO;
    std::vector<TraceEntry> trace; // 1 stage for IO, 4 for CoT, 3 for ToT
};

} // namespace reqcheck::reason
