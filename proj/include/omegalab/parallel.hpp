#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace omegalab {

// OMEGALAB_THREADS caps worker threads; unset or 0 means hardware concurrency.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("OMEGALAB_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  try {
    unsigned long v = std::stoul(env);
    return v == 0 ? hw : static_cast<unsigned>(v);
  } catch (...) {
    return hw;
  }
}

// Runs body(i) for i in [0, n). Each index runs exactly once; callers write
// results into per-index slots so aggregation order stays deterministic.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
}

}  // namespace omegalab
