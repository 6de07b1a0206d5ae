#pragma once
// Minimal work-sharing loop. Thread count comes from PIMSNER_LAB_THREADS
// (default: hardware concurrency). Results must be written to disjoint slots;
// the loop provides no synchronization beyond the final join.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pimsner {

inline int thread_count() {
  if (const char* env = std::getenv("PIMSNER_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t tc =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (tc <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(tc);
  for (std::size_t t = 0; t < tc; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace pimsner
