#include "reqcheck/common/errors.hpp"

namespace reqcheck {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyDocument: return "EmptyDocument";
        case ErrorCode::UnreadableFile: return "UnreadableFile";
        case ErrorCode::InvalidChunkConfig: return "InvalidChunkConfig";
        case ErrorCode::CacheMiss: return "CacheMiss";
        case ErrorCode::ProviderError: return "ProviderError";
        case ErrorCode::LlmProtocolError: return "LlmProtocolError";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::UnparseableVerdict: return "UnparseableVerdict";
        case ErrorCode::UnparseableStage: return "UnparseableStage";
        case ErrorCode::AgentCountMismatch: return "AgentCountMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::IndexNotFound: return "IndexNotFound";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace reqcheck
