#pragma once

#include "reqcheck/common/errors.hpp"
#include "reqcheck/llm/types.hpp"

#include <algorithm>
#include <cmath>

namespace reqcheck::retrieval {

/// Cosine similarity in [-1,1]. Throws DimensionMismatch / ZeroVector.
inline double cosine_similarity(const llm::EmbeddingVector& u, const llm::EmbeddingVector& v) {
    if (u.dimension() != v.dimension()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(u.dimension()) + " vs " + std::to_string(v.dimension()));
    }
    if (u.dimension() == 0) {
        throw Error(ErrorCode::ZeroVector, "empty vectors");
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu <= 0.0 || nv <= 0.0) {
        throw Error(ErrorCode::ZeroVector, "zero-norm vector");
    }
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

} // namespace reqcheck::retrieval
