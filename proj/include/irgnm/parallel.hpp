#pragma once

#include <cstddef>
#include <functional>

namespace irgnm {

/// Worker count: hardware concurrency, capped by IRGNM_IV_THREADS when set.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Indices are handed
/// out dynamically; the first exception thrown by any task is rethrown after
/// all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace irgnm
