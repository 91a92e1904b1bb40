#pragma once

#include <cstddef>
#include <functional>

namespace zpflab {

// Worker count: ZPFLAB_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; the
// caller owns any per-index output slot, so results do not depend on
// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace zpflab
