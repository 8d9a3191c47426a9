#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace excir::detail {

// Runs fn(i) for i in [0, count) on up to `threads` workers, task i going to
// worker i % threads. The first exception thrown (lowest task index) is
// rethrown on the caller's thread once every worker has stopped.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1u), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first;
  std::size_t first_index = count;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < first_index) {
              first_index = i;
              first = std::current_exception();
            }
            return;
          }
        }
      });
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace excir::detail
