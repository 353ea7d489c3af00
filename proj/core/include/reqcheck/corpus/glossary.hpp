#pragma once

#include "reqcheck/corpus/types.hpp"

#include <vector>

namespace reqcheck::corpus {

/// Heuristic glossary extraction: looks for a section headed "Glossary",
/// "Definitions" or "Terms" and collects "TERM: definition" lines until the
/// pattern stops matching. Returns an empty list when no section is found.
/// Duplicate terms are merged. Requires a Reference document.
std::vector<GlossaryEntry> extract_glossary(const Document& document);

} // namespace reqcheck::corpus
