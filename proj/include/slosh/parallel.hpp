#pragma once

#include <cstddef>
#include <functional>

namespace slosh {

/// Worker count: hardware concurrency, capped by the SLOSH_THREADS
/// environment variable when it holds a positive integer.
unsigned worker_count();

/// Calls body(i) for i in [0, n). Iterations are split into contiguous
/// blocks, one per worker; each index is processed exactly once, so results
/// written to distinct slots do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace slosh
