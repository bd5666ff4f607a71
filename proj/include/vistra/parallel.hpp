#pragma once

#include <cstddef>
#include <functional>

namespace vistra {

/// Worker count: VISTRA_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Rethrows the
/// exception of the lowest failing index after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = worker_count());

}  // namespace vistra
