#pragma once

#include <cstddef>
#include <functional>

namespace bkhm {

/// Worker count: BKHM_THREADS if set (>= 1), else the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads with a fixed
/// contiguous partition. fn must only write to slots owned by i.
/// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace bkhm
