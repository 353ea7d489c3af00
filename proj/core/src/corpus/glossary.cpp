#include "reqcheck/corpus/glossary.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"

#include <map>
#include <regex>

namespace reqcheck::corpus {

namespace {

bool is_section_header(const std::string& line) {
    static const std::regex header(
        R"(^\s*(?:glossary(?:\s+of\s+terms)?|definitions|terms)\s*:?\s*$)",
        std::regex::icase);
    return std::regex_match(line, header);
}

bool parse_entry_line(const std::string& line, std::string& term, std::string& definition) {
    static const std::regex entry(R"(^\s*([A-Za-z][A-Za-z0-9 _/\-\.]{0,63}?)\s*:\s*(\S.*?)\s*$)");
    std::smatch match;
    if (!std::regex_match(line, match, entry)) return false;
    term = match[1].str();
    definition = match[2].str();
    return !term.empty();
}

} // namespace

std::vector<GlossaryEntry> extract_glossary(const Document& document) {
    if (document.kind != DocumentKind::Reference) {
        throw Error(ErrorCode::ConfigError,
                    "glossary extraction expects a reference document, got " +
                        document.doc_id);
    }

    // Keyed by term so duplicates merge; insertion order preserved for output.
    std::vector<std::string> order;
    std::map<std::string, std::string> definitions;

    bool in_section = false;
    for (const auto& line : strings::split_lines(document.body)) {
        if (is_section_header(line)) {
            in_section = true;
            continue;
        }
        if (!in_section) continue;
        if (strings::trim(line).empty()) continue;

        std::string term;
        std::string definition;
        if (!parse_entry_line(line, term, definition)) {
            in_section = false; // section ends at the first non-matching line
            continue;
        }
        auto it = definitions.find(term);
        if (it == definitions.end()) {
            definitions[term] = definition;
            order.push_back(term);
        } else if (it->second != definition && it->second.find(definition) == std::string::npos) {
            it->second += "; " + definition;
        }
    }

    std::vector<GlossaryEntry> entries;
    entries.reserve(order.size());
    for (const auto& term : order) {
        entries.push_back({term, definitions[term], document.doc_id});
    }
    return entries;
}

} // namespace reqcheck::corpus
