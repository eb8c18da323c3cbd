#pragma once

#include <cstddef>
#include <functional>

namespace gregsolid {

/// Number of worker threads the library will use.
/// Resolution order: GREGSOLID_THREADS environment variable (0 = auto),
/// then hardware concurrency.
std::size_t worker_count();

/// Run fn(i) for i in [0, n) across the configured worker threads.
/// Falls back to a plain loop when only one worker is available or n is small.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gregsolid
