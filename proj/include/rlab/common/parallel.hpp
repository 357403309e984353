#pragma once

#include <cstddef>
#include <functional>

namespace rlab {

// Worker count. Initialised from RLAB_THREADS, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n) over contiguous static chunks.
// Callers write only to slot i, so results never depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rlab
