#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace ridgetrack {

/// Number of workers actually used when a caller passes `threads`.
/// Zero means "ask the hardware".
inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over contiguous index chunks, one chunk per worker.
/// Chunk boundaries depend only on (n, threads), and callers write disjoint
/// output ranges, so results are identical for every worker count.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  threads = std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(n, 1));
  if (n <= 0) return;
  if (threads <= 1) {
    fn(std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  std::int64_t chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    std::int64_t lo = w * chunk;
    std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ridgetrack
