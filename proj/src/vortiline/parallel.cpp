#include "vortiline/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace vortiline {

int thread_count() {
  static int cached = [] {
    const char* env = std::getenv("VORTILINE_THREADS");
    if (!env) return 1;
    int v = std::atoi(env);
    if (v < 1) v = 1;
    if (v > 64) v = 64;
    return v;
  }();
  return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  int nt = thread_count();
  if (nt <= 1 || n < 2) {
    body(0, n);
    return;
  }
  std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk;
    if (lo >= n) break;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    workers.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace vortiline
