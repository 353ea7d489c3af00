#pragma once

#include <set>
#include <string>
#include <string_view>

namespace reqcheck::corpus {

/// Cleaning passes. Whatever subset the caller selects, passes run in a fixed
/// internal order (control chars, stop words, formatting artifacts, whitespace)
/// chosen so the composition is idempotent.
enum class CleanPass {
    StripControlChars,
    CollapseWhitespace,
    StripFormattingArtifacts,
    RemoveStopwords,
};

CleanPass clean_pass_from_string(const std::string& name);
const char* to_string(CleanPass pass);

std::string clean_text(std::string_view text, const std::set<CleanPass>& passes);

/// Default passes for reference/requirement bodies. Stop-word removal is
/// excluded here: chunk text destined for extraction must stay natural prose.
const std::set<CleanPass>& default_clean_passes();

/// Stop-word removal for the query-term path of dynamic sub-community
/// weighting (the only place the stop-word pass is applied).
std::string strip_query_stopwords(std::string_view text);

} // namespace reqcheck::corpus
