#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace chansim {

// Worker count: CHANSIM_WORKERS if set, else hardware concurrency (capped).
inline int worker_count() {
  if (const char* env = std::getenv("CHANSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// Applies fn to every index in [0, count) and returns results in index
// order, so reductions over the output are deterministic regardless of the
// number of workers.
template <typename T>
std::vector<T> parallel_map(int count, const std::function<T(int)>& fn) {
  std::vector<T> results(count);
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int wkr = 0; wkr < workers; ++wkr) {
    pool.emplace_back([&, wkr] {
      try {
        for (int i = wkr; i < count; i += workers) results[i] = fn(i);
      } catch (...) {
        errors[wkr] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace chansim
