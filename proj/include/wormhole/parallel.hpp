#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wormhole {

inline std::size_t chunk_count(std::size_t count, unsigned threads) {
  if (count == 0) return 0;
  if (threads <= 1 || count == 1) return 1;
  return std::min<std::size_t>(threads, count);
}

// Runs fn(begin, end, chunk) over contiguous chunks of [0, count). Chunk
// boundaries depend only on (count, threads); callers that write results by
// index and reduce in index order afterwards get thread-count-invariant
// output.
inline void parallel_chunks(
    std::size_t count, unsigned threads,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t n_chunks = chunk_count(count, threads);
  if (n_chunks == 0) return;
  if (n_chunks == 1) {
    fn(0, count, 0);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_chunks);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < n_chunks; ++t) {
    const std::size_t begin = count * t / n_chunks;
    const std::size_t end = count * (t + 1) / n_chunks;
    workers.emplace_back([&, begin, end, t] {
      try {
        fn(begin, end, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace wormhole
