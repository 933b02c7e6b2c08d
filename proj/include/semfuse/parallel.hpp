#ifndef SEMFUSE_PARALLEL_HPP
#define SEMFUSE_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace semfuse {

/// Run fn(i) for i in [0, n) on up to `workers` threads. Work items must be
/// independent and write only to their own output slots, so results do not
/// depend on the worker count.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int t = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::atomic<std::size_t> next{0};
  for (int k = 0; k < t; ++k) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace semfuse

#endif
