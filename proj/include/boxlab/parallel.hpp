#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace boxlab {

/// Worker count: BOXLAB_THREADS if set to a positive integer, else the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("BOXLAB_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Splits [0, n) into contiguous chunks, runs `body(begin, end, acc)` per
/// chunk on its own accumulator, and merges accumulators in chunk order.
/// With integer accumulators the result does not depend on the thread count.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::uint64_t n, unsigned threads, Acc init, Body body, Merge merge) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * static_cast<std::uint64_t>(threads)) {
    Acc acc = init;
    body(std::uint64_t{0}, n, acc);
    return acc;
  }
  std::vector<Acc> parts(threads, init);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  std::uint64_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::uint64_t begin = std::min(n, t * chunk);
    std::uint64_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        body(begin, end, parts[t]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Acc acc = init;
  for (auto& p : parts) merge(acc, p);
  return acc;
}

}  // namespace boxlab
