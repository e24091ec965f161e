#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace rbelab {

/// Seed plus worker count for a batch of independent trials.
struct Execution {
  std::uint64_t seed = 0;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs `trial(index, acc)` for every index in [0, trials) across worker
/// threads, each worker owning a contiguous block and its own accumulator.
/// Accumulators are combined with `Acc::merge`, which must be associative and
/// commutative (integer tallies) for results to be independent of the split.
template <class Acc, class TrialFn>
Acc run_trials(std::uint64_t trials, unsigned workers, TrialFn&& trial) {
  const unsigned n_workers = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(trials, 1)));
  if (n_workers <= 1) {
    Acc acc{};
    for (std::uint64_t t = 0; t < trials; ++t) trial(t, acc);
    return acc;
  }

  std::vector<Acc> partial(n_workers);
  std::vector<std::exception_ptr> errors(n_workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
      const std::uint64_t begin = trials * w / n_workers;
      const std::uint64_t end = trials * (w + 1) / n_workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::uint64_t t = begin; t < end; ++t) trial(t, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Acc total{};
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace rbelab
