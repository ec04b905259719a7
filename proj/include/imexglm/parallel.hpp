#pragma once

#include <cstddef>
#include <functional>

namespace imexglm {

/// Number of worker threads: IMEXGLM_WORKERS if set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Calls task(index, worker) for index in [0, n), spreading indices over
/// `workers` threads (worker_count() when 0). Each worker id is used by one
/// thread only, so per-worker scratch can be indexed by it. The first
/// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& task,
                  std::size_t workers = 0);

}  // namespace imexglm
