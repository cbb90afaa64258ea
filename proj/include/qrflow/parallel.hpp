#pragma once

#include <algorithm>
#include <cstdlib>
#include <future>
#include <string>
#include <vector>

namespace qrflow {

// Worker count comes from the QRFLOW_WORKERS environment variable only;
// default is sequential. Results are identical for any setting: work is
// sharded into contiguous chunks and merged in chunk order.
inline int worker_count() {
  const char* env = std::getenv("QRFLOW_WORKERS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n < 1 ? 1 : (n > 64 ? 64 : n);
}

// Applies fn to every index in [0, n) and returns the per-index results in
// index order. fn must be a pure function of its index.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t n, Fn fn) {
  int workers = worker_count();
  std::vector<R> out(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
  std::vector<std::future<void>> futs;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * chunk;
    if (lo >= n) break;
    std::size_t hi = std::min(n, lo + chunk);
    futs.push_back(std::async(std::launch::async, [&out, &fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    }));
  }
  for (auto& f : futs) f.get();
  return out;
}

}  // namespace qrflow
