#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "mbal/types.hpp"

namespace mbal {

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency).  Work item i always receives the same index regardless of the
// thread count, so results written into slot i are thread-count independent.
inline void parallel_for(Index count, int threads,
                         const std::function<void(Index)>& fn) {
  if (count <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned n_workers = threads > 0 ? static_cast<unsigned>(threads) : hw;
  if (n_workers > static_cast<unsigned>(count))
    n_workers = static_cast<unsigned>(count);

  if (n_workers <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mbal
