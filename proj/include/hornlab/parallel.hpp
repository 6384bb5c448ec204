#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hornlab {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls body(row) for every row in [0, rows). Rows are dealt round-robin so the
// assignment does not depend on timing; each row must write only its own output.
template <class Body>
void for_each_row(int rows, int threads, Body body) {
  const int workers = std::min(resolve_threads(threads), std::max(rows, 1));
  if (workers <= 1) {
    for (int r = 0; r < rows; ++r) body(r);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int r = t; r < rows; r += workers) body(r);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hornlab
