#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reqcheck::llm {

enum class Role { System, User, Assistant };

const char* to_string(Role role);
Role role_from_string(const std::string& text);

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

struct ChatRequest {
    std::string model_name;
    std::vector<ChatMessage> messages;
    double temperature = 0.0; // deterministic by default for every pipeline stage
    std::uint32_t max_tokens = 2048;
    std::string request_tag; // pipeline stage label for cost accounting
};

struct Usage {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    Usage usage;
    std::string provider_id;
    bool from_replay = false;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
    double norm() const;

    /// Scales to unit L2 norm. Zero vectors are left untouched.
    void normalize();
};

} // namespace reqcheck::llm
