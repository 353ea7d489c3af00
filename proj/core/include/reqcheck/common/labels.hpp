#pragma once

#include <string>

namespace reqcheck {

/// Dataset-level classes: Conforms/Violates verdicts lift to
/// Compliant/NonCompliant; requirements with no retrievable reference are
/// Irrelevant.
enum class Label { Compliant, NonCompliant, Irrelevant };

const char* to_string(Label label);
Label label_from_string(const std::string& text);

/// Short matrix/axis names: C, NC, IR.
const char* label_abbrev(Label label);

} // namespace reqcheck
