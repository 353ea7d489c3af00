#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace reqcheck {

/// Streaming SHA-256. Used for replay-cache keys and prompt hashes in traces.
class Sha256 {
public:
    Sha256();

    void update(std::string_view data);
    std::array<std::uint8_t, 32> digest();

    /// One-shot convenience: lowercase hex digest of `data`.
    static std::string hex(std::string_view data);

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::uint64_t total_bytes_;
    std::size_t buffer_len_;
};

} // namespace reqcheck
