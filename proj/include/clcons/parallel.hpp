#pragma once

#include <cstdint>
#include <functional>

namespace clcons {

/// Number of worker threads used by grid-sweeping loops. Defaults to the
/// CLCONS_JOBS environment variable, falling back to the hardware count.
int default_jobs();
void set_default_jobs(int jobs);

/// Splits [0, n) into contiguous chunks and runs fn(begin, end) on each, on
/// up to `jobs` threads. Chunks are disjoint, so writes to per-index slots
/// are race-free and the result is schedule-independent. Nested calls from a
/// worker thread run serially.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn,
                  int jobs = 0);

}  // namespace clcons
