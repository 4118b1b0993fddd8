#pragma once

#include <cstddef>
#include <functional>

namespace nhqm {

/// Worker count for n independent tasks. An explicit request wins, then the
/// NHQM_THREADS environment variable, then the hardware concurrency.
int worker_count(std::size_t tasks, int requested = 0);

/// Runs fn(0..n-1) on up to `threads` workers. The first exception thrown by
/// any task is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace nhqm
