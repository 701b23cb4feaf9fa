#pragma once

#include <functional>

namespace motorflux {

/// Worker cap: MOTORFLUX_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_threads();

/// Runs body(0..count-1), using up to worker_threads() threads. Exceptions
/// from the body are rethrown on the calling thread (first one wins).
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace motorflux
