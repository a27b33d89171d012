#pragma once

#include <cstddef>
#include <functional>

namespace gtrans {

// Worker cap from GTRANS_THREADS (default 1).
int worker_count();

// Runs body(i) for i in [0, count) on up to worker_count() threads. Each index
// must write only to its own output slot; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gtrans
