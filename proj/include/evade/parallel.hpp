#pragma once

#include <cstddef>
#include <functional>

namespace evade {

// Worker cap: EVADE_WORKERS if set (minimum 1), else hardware concurrency.
std::size_t worker_limit();

// Runs fn(i) for i in [0, n) across up to worker_limit() threads. Each
// index must be independent; determinism comes from per-index seeds, not
// scheduling order. Exceptions propagate to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace evade
