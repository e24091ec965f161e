#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include <rbelab/parallel.hpp>
#include <rbelab/rng.hpp>

namespace {

using rbelab::Rng;

TEST(SplitMix, MatchesReferenceSequenceFromZero) {
  std::uint64_t state = 0;
  EXPECT_EQ(rbelab::splitmix64(state), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rbelab::splitmix64(state), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rbelab::splitmix64(state), 0x06c45d188009454fULL);
}

TEST(Rng, SameSeedAndStreamReplay) {
  Rng a = Rng::stream(42, 7);
  Rng b = Rng::stream(42, 7);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a(), b());
}

TEST(Rng, DistinctStreamsDiverge) {
  Rng a = Rng::stream(42, 0);
  Rng b = Rng::stream(42, 1);
  int equal = 0;
  for (int k = 0; k < 1000; ++k) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(1);
  double sum = 0.0;
  constexpr int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, BelowIsUnbiasedOverSmallRange) {
  Rng rng(9);
  std::vector<int> counts(6, 0);
  constexpr int n = 600000;
  for (int k = 0; k < n; ++k) {
    const auto v = rng.below(6);
    ASSERT_LT(v, 6u);
    ++counts[v];
  }
  const double p = 1.0 / 6.0;
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, p, 5.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Rng, BitIsBalanced) {
  Rng rng(3);
  int ones = 0;
  constexpr int n = 100000;
  for (int k = 0; k < n; ++k) ones += rng.bit();
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 5.0 * std::sqrt(0.25 / n));
}

struct Sum {
  std::uint64_t total = 0;
  void merge(const Sum& o) { total += o.total; }
};

TEST(RunTrials, ResultIndependentOfWorkerCount) {
  auto run = [](unsigned workers) {
    return rbelab::run_trials<Sum>(10007, workers, [](std::uint64_t t, Sum& acc) {
      Rng rng = Rng::stream(5, t);
      acc.total += rng.below(1000);
    });
  };
  const auto one = run(1).total;
  EXPECT_EQ(run(2).total, one);
  EXPECT_EQ(run(7).total, one);
}

TEST(RunTrials, PropagatesTrialExceptions) {
  EXPECT_THROW((rbelab::run_trials<Sum>(100, 3,
                                        [](std::uint64_t t, Sum&) {
                                          if (t == 57) throw std::runtime_error("boom");
                                        })),
               std::runtime_error);
}

TEST(RunTrials, ZeroTrialsGiveEmptyAccumulator) {
  const auto s = rbelab::run_trials<Sum>(0, 4, [](std::uint64_t, Sum& acc) { ++acc.total; });
  EXPECT_EQ(s.total, 0u);
}

}  // namespace
