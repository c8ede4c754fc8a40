#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace satocensus {

/// Calls body(chunk, begin, end) for consecutive chunks of [0, n). Chunk
/// boundaries depend only on n and chunk_size, so callers that reduce
/// per-chunk results in chunk order get the same answer for any thread count.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk_size, unsigned threads, Body&& body) {
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  if (threads <= 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned t = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline unsigned default_threads() {
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

}  // namespace satocensus
