#pragma once

#include "reqcheck/llm/types.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace reqcheck::llm {

/// Append-only JSON-lines store of recorded chat/embedding exchanges, keyed
/// by content hash. Single-writer appends, read-concurrent lookups; every
/// append is flushed so an interrupted run leaves a usable cache.
class ReplayCache {
public:
    explicit ReplayCache(std::filesystem::path path);

    std::optional<std::string> lookup_chat(const std::string& key) const;
    std::optional<std::pair<std::string, Usage>> lookup_chat_with_usage(
        const std::string& key) const;
    std::optional<std::vector<double>> lookup_embedding(const std::string& key) const;

    void store_chat(const std::string& key, const ChatRequest& request,
                    const ChatResponse& response);
    void store_embedding(const std::string& key, const std::string& model_name,
                         const std::string& text, const std::vector<double>& values);

    std::size_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    struct ChatEntry {
        std::string text;
        Usage usage;
    };

    void load();
    void append_line(const std::string& line);

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, ChatEntry> chats_;
    std::unordered_map<std::string, std::vector<double>> embeddings_;
    std::ofstream out_;
};

} // namespace reqcheck::llm
