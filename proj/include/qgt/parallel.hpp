#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qgt {

inline unsigned default_jobs() {
  if (const char* env = std::getenv("QGT_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs f(i) for i in [0, n) on a bounded pool; results land at index i so the
// output order is deterministic regardless of scheduling.
template <class Result>
std::vector<Result> parallel_map(std::size_t n, unsigned jobs,
                                 const std::function<Result(std::size_t)>& f) {
  std::vector<Result> out(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      out[i] = f(i);
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = jobs < n ? jobs : static_cast<unsigned>(n);
  pool.reserve(count);
  for (unsigned j = 0; j < count; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace qgt
