#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace qcorr {

/// Evaluates fn(0..n-1) on a pool of async tasks and returns the results in
/// index order. Exceptions propagate from the lowest failing index.
template <typename Fn>
auto parallel_map(std::size_t n, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out;
  out.reserve(n);
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  for (std::size_t start = 0; start < n; start += workers) {
    const std::size_t stop = std::min(n, start + workers);
    std::vector<std::future<Result>> batch;
    batch.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, [&fn, i] { return fn(i); }));
    }
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

}  // namespace qcorr
