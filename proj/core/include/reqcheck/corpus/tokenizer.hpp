#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace reqcheck::corpus {

/// Rule-based tokenizer with fixed, versioned rules so token counts are
/// reproducible across machines. A token is either a run of word characters
/// (letters, digits, underscore) optionally joined by interior '.' or '\''
/// (so "3.1.6", "2.5" and "don't" stay single tokens), or one punctuation
/// character. Whitespace never produces tokens.
struct TokenSpan {
    std::size_t begin = 0; // byte offset, inclusive
    std::size_t end = 0;   // byte offset, exclusive
};

const char* tokenizer_version();

std::vector<TokenSpan> tokenize_spans(std::string_view text);

/// Token texts (convenience over tokenize_spans).
std::vector<std::string> tokenize(std::string_view text);

std::size_t count_tokens(std::string_view text);

/// Fixed English stop-word list (includes requirements-English modals).
/// Applied only on the query-term path, never to chunk text fed to extraction.
bool is_stopword(std::string_view token);

} // namespace reqcheck::corpus
