#include "evenlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace evenlab {

std::size_t worker_count() {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("EVENLAB_MAX_WORKERS")) {
    try {
      const long value = std::stol(cap);
      if (value >= 1) workers = std::min(workers, static_cast<std::size_t>(value));
    } catch (const std::exception&) {
      // ignore malformed caps
    }
  }
  return workers;
}

void parallel_chunks(std::uint64_t n,
                     const std::function<void(std::uint64_t, std::uint64_t)>& body) {
  if (n == 0) return;
  const std::uint64_t workers = std::min<std::uint64_t>(worker_count(), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t parallel_count(std::uint64_t n, const std::function<bool(std::uint64_t)>& pred) {
  std::atomic<std::uint64_t> total{0};
  parallel_chunks(n, [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t local = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (pred(i)) ++local;
    }
    total.fetch_add(local, std::memory_order_relaxed);
  });
  return total.load();
}

}  // namespace evenlab
