#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace csgas {

inline int thread_count() {
  if (const char* env = std::getenv("CSGAS_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Deterministic data-parallel map over [0,n): each index writes its own
// output slot, reductions are done by the caller in index order, so results
// are identical to serial evaluation for any thread count.
template <typename F>
void parallel_for_index(std::size_t n, const F& f) {
  int nt = thread_count();
  if (nt <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    workers.emplace_back([&, t]() {
      for (std::size_t i = t; i < n; i += nt) f(i);
    });
  }
  for (auto& w : workers) w.join();
}

// Ordered sum of per-index contributions.
template <typename T, typename F>
T parallel_sum(std::size_t n, const F& f) {
  std::vector<T> slots(n);
  parallel_for_index(n, [&](std::size_t i) { slots[i] = f(i); });
  T total{};
  for (std::size_t i = 0; i < n; ++i) total += slots[i];
  return total;
}

}  // namespace csgas
