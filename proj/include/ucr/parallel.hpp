#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ucr {

/// Trials per block. Fixed so that block boundaries, and therefore the
/// floating-point reduction order, do not depend on the worker count.
inline constexpr std::uint64_t kTrialBlock = 4096;

inline unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(begin, end, acc) over fixed-size blocks of [0, trials) on up to
/// `workers` threads, then merges the per-block accumulators in block order.
/// Acc needs a copy constructor and `void merge(const Acc&)`.
template <class Acc, class Body>
Acc run_blocks(std::uint64_t trials, unsigned workers, const Acc& init, Body body) {
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Acc> partial(blocks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (std::uint64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
        const std::uint64_t begin = b * kTrialBlock;
        body(begin, std::min(trials, begin + kTrialBlock), partial[b]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(blocks);
    }
  };

  const unsigned n = std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(blocks, 1));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  Acc total = init;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace ucr
