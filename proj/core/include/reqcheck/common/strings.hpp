#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reqcheck::strings {

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::string to_upper(std::string_view text);
std::vector<std::string> split_lines(std::string_view text);
std::string replace_all(std::string text, std::string_view from, std::string_view to);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool iequals(std::string_view a, std::string_view b);

/// Lowercase + collapse all whitespace runs to single spaces + trim.
/// This is the normalization used for exact-match coverage scoring.
std::string normalize_ws(std::string_view text);

} // namespace reqcheck::strings
