#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace pgmerge {

/// Runs fn(index) for index in [0, n). workers == 1 executes inline in
/// ascending order (the deterministic mode); otherwise a shared atomic
/// cursor feeds worker threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) {
        return;
      }
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  unsigned spawn = std::min<std::size_t>(workers, n);
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
}

inline unsigned default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

} // namespace pgmerge
