#pragma once

#include <cstddef>
#include <functional>

namespace liris {

/// Worker count from LIRIS_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

/// Calls fn(i) for every i in [0, n) on up to `threads` workers.
/// Each index runs exactly once; fn must only write state owned by i.
/// The first exception thrown by any fn is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace liris
