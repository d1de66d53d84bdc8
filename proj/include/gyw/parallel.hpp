#ifndef GYW_PARALLEL_HPP
#define GYW_PARALLEL_HPP

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "gyw/common.hpp"

namespace gyw {

/// Worker count from GYW_WORKERS, else the hardware concurrency (at least 1).
int worker_count();

/// Runs body(k) for k in [0, count) on up to `workers` threads. Indices are
/// split into contiguous chunks; body must only write state owned by index k,
/// which makes the result independent of the schedule. The exception thrown
/// by the lowest failing index is rethrown after all threads join.
template <typename Body>
void parallel_for(Index count, Body&& body, int workers = worker_count()) {
  if (count <= 0) return;
  const Index threads = std::max<Index>(1, std::min<Index>(workers, count));
  if (threads == 1) {
    for (Index k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (Index w = 0; w < threads; ++w) {
    const Index begin = count * w / threads;
    const Index end = count * (w + 1) / threads;
    pool.emplace_back([&, begin, end] {
      for (Index k = begin; k < end; ++k) {
        try {
          body(k);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gyw

#endif  // GYW_PARALLEL_HPP
