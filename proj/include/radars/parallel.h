#ifndef RADARS_PARALLEL_H_
#define RADARS_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace radars {

/// Worker cap: RADARS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
int MaxThreads();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Each index is handled
/// by exactly one call, so per-index results never depend on the thread
/// count. Small ranges (n * cost_per_item below a threshold) run inline.
void ParallelFor(std::size_t n, std::size_t cost_per_item,
                 const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace radars

#endif  // RADARS_PARALLEL_H_
