#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace optdom {

/// Number of worker threads used by parallel_for (at least 1).
inline std::size_t worker_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return std::clamp<std::size_t>(hc == 0 ? 1 : hc, 1, 16);
}

/// Calls body(k) for k in [0, count), spreading indices over threads.
/// Results must be written to per-index slots; the first exception thrown
/// by any task (lowest index) is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t max_workers = 0) {
  const std::size_t workers = std::min(count, max_workers == 0 ? worker_count() : max_workers);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t k = next.fetch_add(1);
          if (k >= count) return;
          try {
            body(k);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (k < error_index) {
              error_index = k;
              error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace optdom
