#pragma once

// Static block partitioning over std::thread. Work items are assigned by
// index, never by completion order, so results are independent of the
// thread count.

#include <cstddef>
#include <functional>

namespace toral {

/// Upper bound on worker threads (0 restores the default, hardware concurrency).
void set_max_threads(std::size_t n) noexcept;
std::size_t max_threads() noexcept;

/// Calls body(begin, end) on disjoint blocks covering [0, n). Blocks of fewer
/// than `grain` items are not split further. Exceptions from any block are
/// rethrown on the calling thread (the first one by block index).
void parallel_for(std::size_t n, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace toral
