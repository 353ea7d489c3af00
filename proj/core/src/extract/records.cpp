#include "reqcheck/extract/records.hpp"

#include "reqcheck/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace reqcheck::extract {

namespace {

std::string strip_field(std::string field) {
    field = strings::trim(field);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
        field = field.substr(1, field.size() - 2);
    }
    return field;
}

std::vector<std::string> split_on(const std::string& text, const std::string& sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + sep.size();
    }
    return parts;
}

bool parse_strength(const std::string& text, double& out) {
    try {
        std::size_t consumed = 0;
        out = std::stod(text, &consumed);
        while (consumed < text.size() &&
               std::isspace(static_cast<unsigned char>(text[consumed]))) {
            ++consumed;
        }
        return consumed == text.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

// Shortest decimal form that parses back to the same double.
std::string format_strength(double value) {
    for (int precision = 1; precision <= 17; ++precision) {
        std::ostringstream out;
        out << std::setprecision(precision) << value;
        if (std::stod(out.str()) == value) return out.str();
    }
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

} // namespace

ParseResult parse_extraction_output(const std::string& text,
                                    const std::vector<std::string>& entity_types) {
    ParseResult result;

    std::string body = text;
    if (auto end = body.find(kCompletionDelimiter); end != std::string::npos) {
        body = body.substr(0, end);
    }

    std::vector<std::string> allowed;
    allowed.reserve(entity_types.size());
    for (const auto& type : entity_types) allowed.push_back(strings::to_lower(type));

    for (const auto& segment : split_on(body, kRecordDelimiter)) {
        std::size_t open = segment.find('(');
        std::size_t close = segment.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close <= open) {
            continue; // surrounding prose, not a record
        }
        ++result.record_count;

        auto fields = split_on(segment.substr(open + 1, close - open - 1), kFieldDelimiter);
        for (auto& field : fields) field = strip_field(field);

        const std::string tag = strings::to_lower(fields.empty() ? "" : fields[0]);
        if (tag == "entity" && fields.size() == 4) {
            EntityRecord entity;
            entity.name = strings::to_upper(fields[1]);
            entity.entity_type = strings::to_lower(fields[2]);
            entity.description = fields[3];
            bool type_ok = std::find(allowed.begin(), allowed.end(), entity.entity_type) !=
                           allowed.end();
            if (entity.name.empty() || !type_ok) {
                ++result.malformed_count;
                continue;
            }
            result.entities.push_back(std::move(entity));
        } else if (tag == "relationship" && fields.size() == 5) {
            RelationRecord relation;
            relation.source = strings::to_upper(fields[1]);
            relation.target = strings::to_upper(fields[2]);
            relation.description = fields[3];
            double strength = 0.0;
            if (relation.source.empty() || relation.target.empty() ||
                relation.source == relation.target || !parse_strength(fields[4], strength)) {
                ++result.malformed_count;
                continue;
            }
            relation.strength = std::clamp(strength, 1.0, 10.0);
            result.relations.push_back(std::move(relation));
        } else {
            ++result.malformed_count;
        }
    }
    return result;
}

std::string serialize_records(const std::vector<EntityRecord>& entities,
                              const std::vector<RelationRecord>& relations) {
    std::ostringstream out;
    bool first = true;
    auto separator = [&] {
        if (!first) out << kRecordDelimiter << "\n";
        first = false;
    };
    for (const auto& entity : entities) {
        separator();
        out << "(\"entity\"" << kFieldDelimiter << "\"" << entity.name << "\""
            << kFieldDelimiter << "\"" << entity.entity_type << "\"" << kFieldDelimiter << "\""
            << entity.description << "\")";
    }
    for (const auto& relation : relations) {
        separator();
        out << "(\"relationship\"" << kFieldDelimiter << "\"" << relation.source << "\""
            << kFieldDelimiter << "\"" << relation.target << "\"" << kFieldDelimiter << "\""
            << relation.description << "\"" << kFieldDelimiter << "\""
            << format_strength(relation.strength) << "\")";
    }
    if (!first) out << "\n";
    out << kCompletionDelimiter;
    return out.str();
}

std::string records_to_jsonl(const std::vector<EntityRecord>& entities,
                             const std::vector<RelationRecord>& relations) {
    std::ostringstream out;
    for (const auto& entity : entities) {
        nlohmann::ordered_json line;
        line["record"] = "entity";
        line["name"] = entity.name;
        line["type"] = entity.entity_type;
        line["description"] = entity.description;
        line["source_chunks"] =
            std::vector<std::string>(entity.source_chunks.begin(), entity.source_chunks.end());
        out << line.dump() << "\n";
    }
    for (const auto& relation : relations) {
        nlohmann::ordered_json line;
        line["record"] = "relationship";
        line["source"] = relation.source;
        line["target"] = relation.target;
        line["description"] = relation.description;
        line["strength"] = relation.strength;
        line["source_chunks"] = std::vector<std::string>(relation.source_chunks.begin(),
                                                         relation.source_chunks.end());
        out << line.dump() << "\n";
    }
    return out.str();
}

} // namespace reqcheck::extract
