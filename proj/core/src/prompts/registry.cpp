#include "reqcheck/prompts/registry.hpp"

#include "reqcheck/common/errors.hpp"

#include <cctype>

namespace reqcheck::prompts {

namespace {

const std::map<std::string, std::string>& templates() {
    static const std::map<std::string, std::string> all = {
#include "prompts_data.inc"
    };
    return all;
}

bool is_placeholder_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

const char* prompts_version() {
    return "v1";
}

const std::string& get(const std::string& name) {
    const auto& all = templates();
    auto it = all.find(name);
    if (it == all.end()) {
        throw Error(ErrorCode::ConfigError, "unknown prompt template: " + name);
    }
    return it->second;
}

std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : templates()) out.push_back(name);
    return out;
}

std::string render(const std::string& template_text,
                   const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(template_text.size());
    std::size_t i = 0;
    const std::size_t n = template_text.size();
    while (i < n) {
        char c = template_text[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && is_placeholder_char(template_text[j])) ++j;
        if (j < n && j > i + 1 && template_text[j] == '}') {
            std::string key = template_text.substr(i + 1, j - i - 1);
            auto it = values.find(key);
            if (it != values.end()) {
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

std::string render_named(const std::string& name,
                         const std::map<std::string, std::string>& values) {
    return render(get(name), values);
}

} // namespace reqcheck::prompts
