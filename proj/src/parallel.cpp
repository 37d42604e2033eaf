#include "greenlab/parallel.hpp"

#include <atomic>

namespace greenlab {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  int t = g_threads.load();
  if (t > 0) return t;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_default_threads(int n) { g_threads.store(n); }

}  // namespace greenlab
