#include "reqcheck/corpus/chunker.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/corpus/tokenizer.hpp"

#include <cstdio>

namespace reqcheck::corpus {

std::string make_chunk_id(const std::string& doc_id, std::size_t ordinal) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "#%06zu", ordinal);
    return doc_id + suffix;
}

std::vector<Chunk> chunk(const Document& document, const ChunkConfig& config) {
    if (config.chunk_size_tokens == 0 || config.overlap_tokens >= config.chunk_size_tokens) {
        throw Error(ErrorCode::InvalidChunkConfig,
                    "overlap " + std::to_string(config.overlap_tokens) +
                        " must be smaller than chunk size " +
                        std::to_string(config.chunk_size_tokens));
    }

    const std::string& body = document.body;
    const auto tokens = tokenize_spans(body);
    std::vector<Chunk> chunks;
    if (tokens.empty()) return chunks;

    const std::size_t total = tokens.size();
    std::size_t window_start = 0;
    std::size_t prev_cut = 0; // char position where the previous chunk's new content ended
    std::size_t ordinal = 0;

    while (true) {
        const std::size_t window_end = std::min(window_start + config.chunk_size_tokens, total);
        const bool last = (window_end == total);

        // New content of this chunk ends at the end of its last token; the
        // final chunk also absorbs any trailing bytes of the body.
        const std::size_t cut = last ? body.size() : tokens[window_end - 1].end;

        // The chunk starts at its first token, except that the first chunk
        // owns the leading bytes and a zero-overlap chunk starts where the
        // previous one's content ended (so inter-chunk whitespace is kept).
        std::size_t span_start = 0;
        if (ordinal > 0) {
            span_start = std::min(tokens[window_start].begin, prev_cut);
        }

        Chunk out;
        out.doc_id = document.doc_id;
        out.ordinal = ordinal;
        out.chunk_id = make_chunk_id(document.doc_id, ordinal);
        out.token_count = window_end - window_start;
        out.char_span = {span_start, cut};
        out.text = body.substr(span_start, cut - span_start);
        chunks.push_back(std::move(out));

        if (last) break;
        prev_cut = cut;
        window_start = window_end - config.overlap_tokens;
        ++ordinal;
    }
    return chunks;
}

} // namespace reqcheck::corpus
