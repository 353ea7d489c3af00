#pragma once

#include "reqcheck/corpus/types.hpp"

#include <cstddef>
#include <vector>

namespace reqcheck::corpus {

struct ChunkConfig {
    std::size_t chunk_size_tokens = 600;
    std::size_t overlap_tokens = 100;
};

/// Token-window chunking over the (already cleaned) document body.
/// Consecutive chunks overlap by exactly `overlap_tokens`; char spans are cut
/// so that dropping each chunk's overlap prefix and concatenating the rest
/// reproduces the body byte-for-byte. Throws InvalidChunkConfig when
/// overlap >= chunk size or chunk size is zero.
std::vector<Chunk> chunk(const Document& document, const ChunkConfig& config);

/// Chunk id format: "<doc_id>#<6-digit ordinal>"; lexicographic order within
/// a document equals ordinal order.
std::string make_chunk_id(const std::string& doc_id, std::size_t ordinal);

} // namespace reqcheck::corpus
