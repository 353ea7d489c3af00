#include "reqcheck/llm/replay_cache.hpp"

#include "reqcheck/common/errors.hpp"

#include <nlohmann/json.hpp>

namespace reqcheck::llm {

using nlohmann::json;

ReplayCache::ReplayCache(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        load();
    } else if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
}

void ReplayCache::load() {
    std::ifstream in(path_);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open replay cache " + path_.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json entry;
        try {
            entry = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::IoError, path_.string() + ":" + std::to_string(line_no) +
                                                ": " + e.what());
        }
        const std::string kind = entry.value("kind", "");
        const std::string key = entry.value("key", "");
        if (kind == "chat") {
            ChatEntry chat;
            chat.text = entry.at("response").value("text", "");
            chat.usage.prompt_tokens = entry.at("response").value("prompt_tokens", 0ULL);
            chat.usage.completion_tokens = entry.at("response").value("completion_tokens", 0ULL);
            chats_[key] = std::move(chat);
        } else if (kind == "embed") {
            embeddings_[key] = entry.at("response").at("values").get<std::vector<double>>();
        }
    }
}

std::optional<std::string> ReplayCache::lookup_chat(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = chats_.find(key);
    if (it == chats_.end()) return std::nullopt;
    return it->second.text;
}

std::optional<std::pair<std::string, Usage>> ReplayCache::lookup_chat_with_usage(
    const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = chats_.find(key);
    if (it == chats_.end()) return std::nullopt;
    return std::make_pair(it->second.text, it->second.usage);
}

std::optional<std::vector<double>> ReplayCache::lookup_embedding(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = embeddings_.find(key);
    if (it == embeddings_.end()) return std::nullopt;
    return it->second;
}

void ReplayCache::store_chat(const std::string& key, const ChatRequest& request,
                             const ChatResponse& response) {
    json messages = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.content}});
    }
    json entry = {
        {"key", key},
        {"kind", "chat"},
        {"request",
         {{"model", request.model_name},
          {"temperature", request.temperature},
          {"messages", std::move(messages)}}},
        {"response",
         {{"text", response.text},
          {"prompt_tokens", response.usage.prompt_tokens},
          {"completion_tokens", response.usage.completion_tokens}}},
    };

    std::lock_guard lock(mutex_);
    if (chats_.count(key)) return; // first write wins; keeps the file append-only
    chats_[key] = {response.text, response.usage};
    append_line(entry.dump());
}

void ReplayCache::store_embedding(const std::string& key, const std::string& model_name,
                                  const std::string& text, const std::vector<double>& values) {
    json entry = {
        {"key", key},
        {"kind", "embed"},
        {"request", {{"model", model_name}, {"text", text}}},
        {"response", {{"values", values}}},
    };

    std::lock_guard lock(mutex_);
    if (embeddings_.count(key)) return;
    embeddings_[key] = values;
    append_line(entry.dump());
}

void ReplayCache::append_line(const std::string& line) {
    if (!out_.is_open()) {
        out_.open(path_, std::ios::app);
        if (!out_) {
            throw Error(ErrorCode::IoError, "cannot append to replay cache " + path_.string());
        }
    }
    out_ << line << '\n';
    out_.flush();
}

std::size_t ReplayCache::size() const {
    std::lock_guard lock(mutex_);
    return chats_.size() + embeddings_.size();
}

} // namespace reqcheck::llm
