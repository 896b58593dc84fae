#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gcurv {

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled by exactly one worker, so results written per index do not depend
// on the thread count. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += threads) body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace gcurv
