#pragma once

#include <cstddef>
#include <functional>

namespace fer::parallel {

/// Worker cap for parallel_for; 1 disables threading. Thread-safe.
void set_max_threads(int n);
int max_threads();

/// Runs body(begin, end) over a contiguous partition of [0, n).
/// Callers must write to disjoint slots; results are then independent of the
/// schedule and of max_threads. The first exception thrown by any chunk is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fer::parallel
