#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace evenlab {

// Number of worker threads: hardware concurrency, capped by the optional
// EVENLAB_MAX_WORKERS environment variable (values < 1 are ignored).
std::size_t worker_count();

// Splits [0, n) into contiguous chunks and runs body(begin, end) on up to
// worker_count() threads. Blocks until every chunk finished; the first
// exception thrown by any chunk is rethrown on the calling thread.
void parallel_chunks(std::uint64_t n,
                     const std::function<void(std::uint64_t, std::uint64_t)>& body);

// Counts indices in [0, n) for which pred(i) is true. Integer reduction, so
// the result does not depend on the schedule.
std::uint64_t parallel_count(std::uint64_t n, const std::function<bool(std::uint64_t)>& pred);

}  // namespace evenlab
