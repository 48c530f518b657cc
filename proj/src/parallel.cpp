#include "retarget/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace retarget {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::min(resolve_threads(threads), n);
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads - 1);
  int chunk = (n + threads - 1) / threads;
  for (int t = 1; t < threads; ++t) {
    int begin = t * chunk;
    int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&body, begin, end] {
      for (int i = begin; i < end; ++i) body(i);
    });
  }
  for (int i = 0; i < std::min(chunk, n); ++i) body(i);
  for (auto& w : workers) w.join();
}

}  // namespace retarget
