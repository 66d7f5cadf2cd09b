#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gamma_pick::detail {

/// Calls fn(i) for i in [0, count) on up to `threads` workers, in contiguous
/// chunks. Callers write results into per-index slots and reduce serially
/// afterwards, so output never depends on scheduling.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace gamma_pick::detail
