#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dgschwarz {

inline int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

/// Calls f(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once; callers write to disjoint outputs, so results do
/// not depend on scheduling. The first exception thrown is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f, int workers = default_workers()) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(w - 1);
  for (std::size_t t = 1; t < w; ++t) threads.emplace_back(body);
  body();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dgschwarz
