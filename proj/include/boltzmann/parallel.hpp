#pragma once

/**
 * @file parallel.hpp
 * @brief Static contiguous work split over std::thread workers.
 *
 * Worker w always receives the same index range for a given (n, workers), so
 * per-worker partial sums reduced in worker order are reproducible.
 */

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace boltzmann {

/// Worker count from BOLTZMANN_THREADS, else the available hardware parallelism.
inline int default_thread_count()
{
  if (const char* env = std::getenv("BOLTZMANN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// [begin, end) of worker w when n items are split over `workers` contiguous chunks.
inline std::pair<int, int> chunk_range(int n, int workers, int w)
{
  const int base = n / workers, extra = n % workers;
  const int begin = w * base + std::min(w, extra);
  return {begin, begin + base + (w < extra ? 1 : 0)};
}

inline int effective_workers(int n, int workers) { return std::max(1, std::min(workers, n)); }

/**
 * @brief Calls body(worker, begin, end) for each worker; worker 0 runs on the
 *        calling thread. Exceptions are rethrown after all workers joined.
 */
template <class Body>
void parallel_chunks(int n, int workers, Body&& body)
{
  workers = effective_workers(n, workers);
  if (workers == 1) {
    body(0, 0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        const auto [b, e] = chunk_range(n, workers, w);
        body(w, b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  try {
    const auto [b, e] = chunk_range(n, workers, 0);
    body(0, b, e);
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace boltzmann
