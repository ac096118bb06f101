#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace snc {

/// Worker count: SNC_THREADS when set to a positive integer, otherwise the
/// number of logical cores.
int worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Work is
/// handed out dynamically; the first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
  const int workers = std::min<std::ptrdiff_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::ptrdiff_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::ptrdiff_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace snc
