#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace twrn {

// Global cap on worker threads (set from the CLI --jobs flag). 0 = hardware.
void set_max_jobs(int jobs);
int max_jobs();

// Splits [0, n) into contiguous chunks, runs `body(chunk_index, begin, end)`
// on worker threads, and returns once all chunks are done. Chunk boundaries
// depend only on n and the worker count requested by the caller, so callers
// that reduce per-chunk results in chunk order get identical output for any
// worker count.
void parallel_chunks(std::size_t n, std::size_t n_chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace twrn
