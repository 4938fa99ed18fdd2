#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace loopgrating {

/// Worker count for the data-parallel maps. 0 means hardware concurrency.
struct Parallel {
  unsigned threads = 0;

  unsigned resolved() const {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

/// Runs body(i) for i in [0, n). Every index is written by exactly one worker,
/// so results do not depend on the thread count. The first exception thrown by
/// any worker is rethrown on the caller's thread.
inline void parallel_for(std::size_t n, Parallel par, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(par.resolved(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace loopgrating
