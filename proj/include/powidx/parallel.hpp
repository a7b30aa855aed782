#pragma once

// Deterministic work splitting: jobs are cut into chunks whose boundaries
// depend only on the problem size, workers pull chunk indices from an atomic
// counter, and per-chunk results are merged in chunk order. Output is
// therefore invariant under the thread count.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace powidx {

inline unsigned& thread_count_ref() {
  static unsigned n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

inline void set_thread_count(unsigned n) { thread_count_ref() = std::max(1u, n); }
inline unsigned thread_count() { return thread_count_ref(); }

// Runs fn(chunk_index, begin, end) over [0, count) split into nchunks pieces.
inline void parallel_chunks(std::size_t count, std::size_t nchunks,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (nchunks == 0 || nchunks > count) nchunks = count;
  unsigned workers = std::min<std::size_t>(thread_count(), nchunks);
  auto bounds = [&](std::size_t c) {
    std::size_t b = count * c / nchunks;
    std::size_t e = count * (c + 1) / nchunks;
    return std::pair{b, e};
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) {
      auto [b, e] = bounds(c);
      fn(c, b, e);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      auto [b, e] = bounds(c);
      fn(c, b, e);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 0; t + 1 < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

// Map-reduce with chunk-ordered (thread-count independent) merging.
template <class T, class Map, class Merge>
T parallel_reduce(std::size_t count, std::size_t nchunks, T init, Map map_chunk, Merge merge) {
  if (count == 0) return init;
  if (nchunks == 0 || nchunks > count) nchunks = count;
  std::vector<T> partial(nchunks, init);
  parallel_chunks(count, nchunks, [&](std::size_t c, std::size_t b, std::size_t e) {
    partial[c] = map_chunk(b, e);
  });
  T acc = init;
  for (std::size_t c = 0; c < nchunks; ++c) acc = merge(acc, partial[c]);
  return acc;
}

}  // namespace powidx
