#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "gjn/types.hpp"

namespace gjn {

/// Runs f(0..n-1) on a fixed pool of worker threads and returns the results
/// in index order, so the worker count never changes the output. The first
/// exception by index is rethrown after all workers stop.
template <typename F>
auto run_replications(Index n, unsigned workers, F&& f) -> std::vector<decltype(f(Index{}))> {
  using Result = decltype(f(Index{}));
  std::vector<Result> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<Index>(workers, std::max<Index>(n, 1)));

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (Index i = next++; i < n && !failed; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace gjn
