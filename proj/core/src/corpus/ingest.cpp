#include "reqcheck/corpus/ingest.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace reqcheck::corpus {

namespace {

// Replaces invalid UTF-8 sequences with U+FFFD. Returns true if anything
// was replaced.
bool sanitize_utf8(std::string& text) {
    static const std::string replacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(text.size());
    bool replaced = false;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;

        bool ok = len > 0 && i + len <= n;
        for (std::size_t k = 1; ok && k < len; ++k) {
            ok = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
        }
        if (ok) {
            out.append(text, i, len);
            i += len;
        } else {
            out += replacement;
            replaced = true;
            ++i;
        }
    }
    text = std::move(out);
    return replaced;
}

std::string normalize_newlines(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::string first_content_line(const std::string& body) {
    for (const auto& line : strings::split_lines(body)) {
        auto trimmed = strings::trim(line);
        if (!trimmed.empty()) return trimmed;
    }
    return {};
}

bool all_whitespace(const std::string& text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

const char* to_string(DocumentKind kind) {
    return kind == DocumentKind::Reference ? "reference" : "requirement";
}

DocumentKind document_kind_from_string(const std::string& text) {
    if (strings::iequals(text, "reference")) return DocumentKind::Reference;
    if (strings::iequals(text, "requirement")) return DocumentKind::Requirement;
    throw Error(ErrorCode::ConfigError, "unknown document kind: " + text);
}

const std::vector<std::string>& requirement_field_keys() {
    static const std::vector<std::string> keys = {
        "Title", "Description", "Input", "Processing", "Output", "ErrorHandling"};
    return keys;
}

std::string render_requirement(const Requirement& req) {
    if (!req.structured_fields || req.structured_fields->empty()) return req.text;
    std::ostringstream out;
    bool first = true;
    for (const auto& key : requirement_field_keys()) {
        auto it = req.structured_fields->find(key);
        if (it == req.structured_fields->end()) continue;
        if (!first) out << "\n";
        out << key << ": " << it->second;
        first = false;
    }
    if (first) return req.text;
    return out.str();
}

Document ingest(const std::filesystem::path& path, DocumentKind kind,
                std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::UnreadableFile, "read failure on " + path.string());
    }

    std::string body = buffer.str();
    if (sanitize_utf8(body) && warnings) {
        warnings->push_back("lossy UTF-8 decode: " + path.string());
    }
    body = normalize_newlines(body);

    if (body.empty() || all_whitespace(body)) {
        throw Error(ErrorCode::EmptyDocument, path.string());
    }

    Document doc;
    doc.doc_id = path.stem().string();
    doc.title = first_content_line(body);
    doc.body = std::move(body);
    doc.kind = kind;
    doc.source_path = path.string();
    return doc;
}

std::vector<Requirement> load_requirements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
    }

    std::vector<Requirement> requirements;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (strings::trim(line).empty()) continue;

        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }

        Requirement req;
        req.req_id = parsed.value("req_id", "");
        req.text = parsed.value("text", "");
        if (req.req_id.empty() || req.text.empty()) {
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(line_no) +
                            ": req_id and text are required");
        }
        if (parsed.contains("structured_fields")) {
            std::map<std::string, std::string> fields;
            const auto& keys = requirement_field_keys();
            for (const auto& [key, value] : parsed.at("structured_fields").items()) {
                if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                    throw Error(ErrorCode::ConfigError,
                                path.string() + ":" + std::to_string(line_no) +
                                    ": unknown structured field '" + key + "'");
                }
                fields[key] = value.get<std::string>();
            }
            req.structured_fields = std::move(fields);
        }
        requirements.push_back(std::move(req));
    }
    return requirements;
}

std::string glossary_to_json(const std::vector<GlossaryEntry>& entries) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& entry : entries) {
        out.push_back({{"term", entry.term},
                       {"definition", entry.definition},
                       {"source_doc", entry.source_doc}});
    }
    return out.dump(2) + "\n";
}

} // namespace reqcheck::corpus
