#pragma once

#include "reqcheck/corpus/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace reqcheck::corpus {

/// Reads a plain-text / Markdown file into a Document. Line endings are
/// normalized to '\n'; invalid UTF-8 bytes are replaced (lossy) and reported
/// through `warnings` when given. Throws EmptyDocument / UnreadableFile.
Document ingest(const std::filesystem::path& path, DocumentKind kind,
                std::vector<std::string>* warnings = nullptr);

/// Loads a requirement set from a JSON-lines file: one object per line with
/// fields req_id, text and optional structured_fields (keys limited to the
/// six IEEE-830-style components).
std::vector<Requirement> load_requirements(const std::filesystem::path& path);

std::string glossary_to_json(const std::vector<GlossaryEntry>& entries);

} // namespace reqcheck::corpus
