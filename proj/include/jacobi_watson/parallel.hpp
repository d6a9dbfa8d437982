#pragma once

#include <cstddef>
#include <functional>

namespace jw {

/// Worker count for grid sweeps: JW_THREADS if set and positive, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so the outcome is order independent.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jw
