#pragma once

// Chunked parallel-for over an index range. Results must be written by
// index into preallocated storage so the aggregation order (and therefore
// every output file) is independent of the thread count.

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace brittle {

inline int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BRITTLE_LIMIT_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& body) {
  jobs = resolve_jobs(jobs);
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([=, &body]() {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace brittle
