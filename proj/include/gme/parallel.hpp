#pragma once

#include <cstdint>
#include <functional>

namespace gme {

/// Number of worker threads: hardware concurrency, capped by the GME_THREADS
/// environment variable when set. Always >= 1. Thread count never changes
/// results, only scheduling.
int worker_count();

/// Splits [0, total) into consecutive blocks of chunk_size and calls
/// fn(chunk_index, begin, end) once per block, possibly from several threads.
/// The decomposition is a pure function of (total, chunk_size); callers that
/// store per-chunk partials and reduce them in chunk order get bit-identical
/// results for any worker count.
void for_each_chunk(std::int64_t total, std::int64_t chunk_size,
                    const std::function<void(std::int64_t, std::int64_t,
                                             std::int64_t)>& fn);

}  // namespace gme
