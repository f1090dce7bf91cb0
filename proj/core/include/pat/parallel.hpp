#pragma once

#include <cstddef>
#include <functional>

namespace pat {

/// Worker count used by the operators. Defaults to the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Splits [0, n) into a fixed number of contiguous chunks and runs
/// body(begin, end, chunk) for each. The partition depends only on n and
/// max_chunks, never on the thread count, so per-chunk partial results
/// reduced in chunk order are bitwise reproducible.
void parallel_chunks(std::size_t n, std::size_t max_chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Number of chunks parallel_chunks will use for the given arguments.
std::size_t chunk_count(std::size_t n, std::size_t max_chunks);

}  // namespace pat
