#pragma once

#include <cstddef>
#include <functional>

namespace agg {

/// Worker count: AGG_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 means
/// worker_count()). Each index runs exactly once; the first exception thrown
/// by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

}  // namespace agg
