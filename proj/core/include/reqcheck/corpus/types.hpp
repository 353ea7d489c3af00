#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reqcheck::corpus {

enum class DocumentKind { Reference, Requirement };

const char* to_string(DocumentKind kind);
DocumentKind document_kind_from_string(const std::string& text);

struct Document {
    std::string doc_id;
    std::string title;
    std::string body; // normalized line endings, guaranteed non-empty
    DocumentKind kind = DocumentKind::Reference;
    std::string source_path;
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    std::size_t ordinal = 0;
    std::string text;
    std::size_t token_count = 0;
    std::pair<std::size_t, std::size_t> char_span{0, 0}; // byte offsets into cleaned body
};

struct GlossaryEntry {
    std::string term;
    std::string definition;
    std::string source_doc;
};

/// IEEE-830-style structured requirement. `structured_fields` keys are limited
/// to the six component names; `text` is always the flat statement.
struct Requirement {
    std::string req_id;
    std::string text;
    std::optional<std::map<std::string, std::string>> structured_fields;
};

/// The six permitted structured-field keys, in presentation order.
const std::vector<std::string>& requirement_field_keys();

/// Renders the requirement for prompting: structured fields when present,
/// otherwise the flat text.
std::string render_requirement(const Requirement& req);

} // namespace reqcheck::corpus
