#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace brwfpt {

/// Thread count to use for a request of `threads` (0 means all hardware threads).
inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Calls body(index, worker) for every index in [0, count), handing out chunks
/// dynamically to `threads` workers. The first exception thrown by any worker
/// stops the loop and is rethrown on the calling thread.
template <class Body>
void parallel_for(std::uint64_t count, int threads, Body&& body) {
  const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(threads)),
                                                               std::max<std::uint64_t>(count, 1)));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  constexpr std::uint64_t kChunk = 256;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](int worker) {
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::uint64_t begin = next.fetch_add(kChunk);
        if (begin >= count) break;
        const std::uint64_t end = std::min(count, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) body(i, worker);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace brwfpt
