#pragma once

#include <cstddef>
#include <functional>

namespace hjrl {

/// Worker count from HJRL_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Calls body(begin, end) on disjoint contiguous chunks covering [0, n).
/// Chunk boundaries depend only on n and the worker count; bodies must write
/// disjoint outputs so results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hjrl
