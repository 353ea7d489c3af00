#include "reqcheck/common/labels.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"

namespace reqcheck {

const char* to_string(Label label) {
    switch (label) {
        case Label::Compliant: return "compliant";
        case Label::NonCompliant: return "non_compliant";
        case Label::Irrelevant: return "irrelevant";
    }
    return "irrelevant";
}

Label label_from_string(const std::string& text) {
    auto lowered = strings::to_lower(strings::trim(text));
    if (lowered == "compliant" || lowered == "c") return Label::Compliant;
    if (lowered == "non_compliant" || lowered == "non-compliant" || lowered == "noncompliant" ||
        lowered == "nc") {
        return Label::NonCompliant;
    }
    if (lowered == "irrelevant" || lowered == "ir") return Label::Irrelevant;
    throw Error(ErrorCode::ConfigError, "unknown label: " + text);
}

const char* label_abbrev(Label label) {
    switch (label) {
        case Label::Compliant: return "C";
        case Label::NonCompliant: return "NC";
        case Label::Irrelevant: return "IR";
    }
    return "IR";
}

} // namespace reqcheck
