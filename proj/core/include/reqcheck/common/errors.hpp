#pragma once

#include <stdexcept>
#include <string>

namespace reqcheck {

enum class ErrorCode {
    EmptyDocument,
    UnreadableFile,
    InvalidChunkConfig,
    CacheMiss,
    ProviderError,
    LlmProtocolError,
    MalformedRecord,
    UnparseableVerdict,
    UnparseableStage,
    AgentCountMismatch,
    DimensionMismatch,
    ZeroVector,
    EmptyIndex,
    MissingGroundTruth,
    IoError,
    SchemaVersionMismatch,
    IndexNotFound,
    ConfigError,
};

const char* to_string(ErrorCode code);

/// Typed failure carrying an ErrorCode so callers can branch on the cause.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace reqcheck
