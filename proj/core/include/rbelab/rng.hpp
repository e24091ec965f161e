#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rbelab {

/// xoshiro256** generator whose state is derived from a (master seed, stream)
/// pair through SplitMix64. Every trial of an experiment draws from its own
/// stream, so results do not depend on scheduling or worker count.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}
  Rng(std::uint64_t master_seed, std::uint64_t stream);

  static Rng stream(std::uint64_t master_seed, std::uint64_t stream) {
    return Rng(master_seed, stream);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  int bit() { return static_cast<int>((*this)() >> 63); }
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace rbelab
