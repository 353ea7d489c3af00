#pragma once

#include <map>
#include <string>
#include <vector>

namespace reqcheck::prompts {

/// Version tag recorded in build manifests; bump when any template changes.
const char* prompts_version();

/// Raw template text by name (file stem under core/prompts/).
/// Throws ConfigError for unknown names.
const std::string& get(const std::string& name);

std::vector<std::string> names();

/// Fills {placeholder} slots from `values`; unknown or malformed braces are
/// left verbatim (templates legitimately contain literal JSON braces).
std::string render(const std::string& template_text,
                   const std::map<std::string, std::string>& values);

std::string render_named(const std::string& name,
                         const std::map<std::string, std::string>& values);

} // namespace reqcheck::prompts
