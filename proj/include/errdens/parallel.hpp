#pragma once

#include <cstddef>
#include <functional>

namespace errdens {

//! Worker count used by parallel_for: ERRDENS_THREADS if set and nonzero,
//! otherwise the hardware concurrency.
int worker_count();

//! Runs fn(i) for i in [0, count) on up to worker_count() threads.
//! Work items must be independent; callers write results into
//! pre-indexed slots so the outcome does not depend on scheduling.
//! Exceptions thrown by items are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace errdens
