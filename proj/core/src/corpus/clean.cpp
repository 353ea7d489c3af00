#include "reqcheck/corpus/clean.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"
#include "reqcheck/corpus/tokenizer.hpp"

#include <cctype>
#include <regex>

namespace reqcheck::corpus {

namespace {

std::string strip_control_chars(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        bool control = (c < 0x20 && c != '\n' && c != '\t') || c == 0x7f;
        if (!control) out.push_back(ch);
    }
    return out;
}

std::string remove_stopwords(const std::string& text) {
    auto spans = tokenize_spans(text);
    std::vector<bool> drop(text.size(), false);
    for (const auto& span : spans) {
        std::string_view token(text.data() + span.begin, span.end - span.begin);
        if (!is_stopword(token)) continue;
        for (std::size_t i = span.begin; i < span.end; ++i) drop[i] = true;
        // Take one adjacent plain space with the word, preferring the
        // following one, so no double spaces are left behind.
        if (span.end < text.size() && text[span.end] == ' ') {
            drop[span.end] = true;
        } else if (span.begin > 0 && text[span.begin - 1] == ' ') {
            drop[span.begin - 1] = true;
        }
    }
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!drop[i]) out.push_back(text[i]);
    }
    return out;
}

bool is_artifact_line(const std::string& line) {
    // Page-number artifacts: "— 14 —", "- 14 -", "Page 14", "Page 3 of 12".
    static const std::regex dashed(R"(^\s*(?:—|–|-)+\s*\d+\s*(?:—|–|-)+\s*$)");
    static const std::regex paged(R"(^\s*[Pp][Aa][Gg][Ee]\s+\d+(?:\s+of\s+\d+)?\s*$)");
    return std::regex_match(line, dashed) || std::regex_match(line, paged);
}

std::string strip_formatting_artifacts(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        bool last = (nl == std::string::npos);
        std::string line = text.substr(start, last ? std::string::npos : nl - start);
        if (!is_artifact_line(line)) {
            out += line;
            if (!last) out.push_back('\n');
        }
        if (last) break;
        start = nl + 1;
    }
    return out;
}

std::string collapse_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t') {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
            out.push_back(' ');
        } else if (c == '\n') {
            while (i < text.size() && text[i] == '\n') ++i;
            out.push_back('\n');
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

} // namespace

CleanPass clean_pass_from_string(const std::string& name) {
    if (name == "strip-control-chars") return CleanPass::StripControlChars;
    if (name == "collapse-whitespace") return CleanPass::CollapseWhitespace;
    if (name == "strip-formatting-artifacts") return CleanPass::StripFormattingArtifacts;
    if (name == "remove-stopwords") return CleanPass::RemoveStopwords;
    throw Error(ErrorCode::ConfigError, "unknown clean pass: " + name);
}

const char* to_string(CleanPass pass) {
    switch (pass) {
        case CleanPass::StripControlChars: return "strip-control-chars";
        case CleanPass::CollapseWhitespace: return "collapse-whitespace";
        case CleanPass::StripFormattingArtifacts: return "strip-formatting-artifacts";
        case CleanPass::RemoveStopwords: return "remove-stopwords";
    }
    return "unknown";
}

std::string clean_text(std::string_view text, const std::set<CleanPass>& passes) {
    std::string out(text);
    if (passes.count(CleanPass::StripControlChars)) out = strip_control_chars(out);
    if (passes.count(CleanPass::RemoveStopwords)) out = remove_stopwords(out);
    if (passes.count(CleanPass::StripFormattingArtifacts)) out = strip_formatting_artifacts(out);
    if (passes.count(CleanPass::CollapseWhitespace)) out = collapse_whitespace(out);
    return out;
}

const std::set<CleanPass>& default_clean_passes() {
    static const std::set<CleanPass> passes = {
        CleanPass::StripControlChars,
        CleanPass::StripFormattingArtifacts,
        CleanPass::CollapseWhitespace,
    };
    return passes;
}

std::string strip_query_stopwords(std::string_view text) {
    return clean_text(text, {CleanPass::RemoveStopwords, CleanPass::CollapseWhitespace});
}

} // namespace reqcheck::corpus
