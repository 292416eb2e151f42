#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace quatsync {

/// Worker cap for parameter sweeps: QUATSYNC_THREADS when set to a positive
/// integer, otherwise the hardware concurrency.
inline unsigned thread_cap() {
  if (const char* env = std::getenv("QUATSYNC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, n) on up to thread_cap() workers. Results must be
/// written by index; the merge order is then independent of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned k = 0; k < workers; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace quatsync
