#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace linesum {

/// Worker count from `LINESUM_THREADS`, or 1 when unset or malformed.
inline int default_threads() {
  if (const char* env = std::getenv("LINESUM_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  return 1;
}

/// Runs fn(block) for every block in [0, blocks), striding blocks over
/// `threads` workers. Callers write into per-block slots, so the outcome is
/// independent of the worker count.
template <class Fn>
void parallel_blocks(std::size_t blocks, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(blocks, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) fn(b);
    });
  }
  for (auto& th : pool) th.join();
}

/// Pairwise (tree) sum in index order; deterministic for a fixed input.
template <class T>
T tree_sum(std::vector<T> values) {
  if (values.empty()) return T{};
  std::size_t len = values.size();
  while (len > 1) {
    const std::size_t half = (len + 1) / 2;
    for (std::size_t i = 0; i + half < len; ++i) values[i] += values[i + half];
    len = half;
  }
  return values[0];
}

}  // namespace linesum
