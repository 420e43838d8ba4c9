#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace regcomply {

// Worker count: REGCOMPLY_THREADS when set and positive, otherwise the
// machine's hardware concurrency.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("REGCOMPLY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::size_t resolve_workers(std::size_t requested) {
  return requested == 0 ? default_workers() : requested;
}

// Calls fn(i) for every i in [0, count). Items are dealt to workers in
// contiguous blocks; fn must write its result to a slot owned by i so the
// outcome is independent of the worker count. The first exception thrown by
// any item is rethrown on the caller's thread.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::min(resolve_workers(workers), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t lo = count * t / workers;
    const std::size_t hi = count * (t + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();  // joins
  if (failure) std::rethrow_exception(failure);
}

}  // namespace regcomply
