#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace greenlab {

/// Process-wide worker count (CLI --threads). Defaults to the hardware count.
int default_threads();
void set_default_threads(int n);

/// Runs fn(i) for i in [0, n). Work is chunked by index and results must be
/// written to index-addressed slots, so the outcome is independent of the
/// schedule.
inline void parallel_for(long n, const std::function<void(long)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = default_threads();
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, n)));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (long i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace greenlab
