#pragma once

// Index-parallel loop shared by the trajectory engine and parameter sweeps.
// Work items write into pre-sized slots, so results never depend on the
// worker count or scheduling order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sivsim::detail {

template <class Fn>
void parallel_for(int workers, int n, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < std::min(workers, n); ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace sivsim::detail
