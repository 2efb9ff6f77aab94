#pragma once
#include <cstddef>
#include <functional>

namespace vortiline {

// Worker count from VORTILINE_THREADS (default 1, clamped to [1, 64]).
int thread_count();

// Static block partition of [0, n); chunks run on std::thread workers.
// Results that depend on accumulation order must combine per-chunk partials
// in chunk order on the caller side to stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vortiline
