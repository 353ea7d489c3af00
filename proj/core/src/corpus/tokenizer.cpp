#include "reqcheck/corpus/tokenizer.hpp"

#include "reqcheck/common/strings.hpp"

#include <cctype>
#include <unordered_set>

namespace reqcheck::corpus {

namespace {

inline bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_';
}

inline bool is_joiner(unsigned char c) {
    return c == '.' || c == '\'';
}

const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> words = {
        "a",    "an",   "and",  "any",  "are",   "as",    "at",    "be",   "been",  "being",
        "but",  "by",   "can",  "do",   "does",  "for",   "from",  "had",  "has",   "have",
        "if",   "in",   "into", "is",   "it",    "its",   "may",   "must", "no",    "not",
        "of",   "on",   "or",   "shall", "should", "so",   "such",  "than", "that",  "the",
        "their", "then", "there", "these", "they", "this", "those", "to",   "upon",  "was",
        "were", "when", "which", "will", "with",  "would",
    };
    return words;
}

} // namespace

const char* tokenizer_version() {
    return "wp-1";
}

std::vector<TokenSpan> tokenize_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            std::size_t start = i;
            ++i;
            while (i < n) {
                unsigned char cur = static_cast<unsigned char>(text[i]);
                if (is_word_char(cur)) {
                    ++i;
                } else if (is_joiner(cur) && i + 1 < n &&
                           is_word_char(static_cast<unsigned char>(text[i + 1]))) {
                    i += 2;
                } else {
                    break;
                }
            }
            spans.push_back({start, i});
        } else {
            spans.push_back({i, i + 1});
            ++i;
        }
    }
    return spans;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for (const auto& span : tokenize_spans(text)) {
        tokens.emplace_back(text.substr(span.begin, span.end - span.begin));
    }
    return tokens;
}

std::size_t count_tokens(std::string_view text) {
    return tokenize_spans(text).size();
}

bool is_stopword(std::string_view token) {
    return stopword_set().count(strings::to_lower(token)) > 0;
}

} // namespace reqcheck::corpus
