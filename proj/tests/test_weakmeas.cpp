#include <gtest/gtest.h>

#include <cmath>

#include <rbelab/weakmeas.hpp>

namespace {

using namespace rbelab;
using weakmeas::WeakMeter;
using weakmeas::WeakStrength;

constexpr double kTol = 1e-12;

TEST(WeakStrength, ValidatesRange) {
  EXPECT_NO_THROW(WeakStrength(0.0));
  EXPECT_NO_THROW(WeakStrength(1.0));
  EXPECT_THROW(WeakStrength(-0.01), std::invalid_argument);
  EXPECT_THROW(WeakStrength(1.01), std::invalid_argument);
  EXPECT_THROW(WeakStrength(std::nan("")), std::invalid_argument);
}

TEST(WEpsilon, MatchesDefinition) {
  for (double eps : {0.0, 0.1, 0.37, 0.8, 1.0}) {
    const auto w = weakmeas::w_epsilon(WeakStrength(eps));
    const Complex a(std::sqrt(1.0 - eps), std::sqrt(eps));
    const Complex b(std::sqrt(1.0 - eps), 0.0);
    const Complex c(0.0, std::sqrt(eps));
    Eigen::Matrix4cd want;
    want << a, 0, 0, 0, 0, a, 0, 0, 0, 0, b, c, 0, 0, c, b;
    EXPECT_LT((w.matrix() - want).norm(), kTol) << eps;
  }
}

// Kraus operators of the meter with the ancilla prepared in |0>:
// M0 = diag(sqrt(1-e) + i sqrt(e), sqrt(1-e)), M1 = diag(0, i sqrt(e)).
TEST(WeakMeter, BranchesMatchKrausOperators) {
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const double eps = rng.uniform();
    const auto s = StateVector::normalized(
        {Complex(rng.uniform() - 0.5, rng.uniform() - 0.5), Complex(rng.uniform() - 0.5, rng.uniform() - 0.5)});
    const WeakMeter meter{WeakStrength(eps)};
    const auto br = meter.branches(s, 0);
    const double p1 = eps * std::norm(s[1]);
    EXPECT_NEAR(br[1].probability, p1, kTol);
    EXPECT_NEAR(br[0].probability, 1.0 - p1, kTol);
    const Complex m00(std::sqrt(1.0 - eps), std::sqrt(eps));
    const auto want0 = StateVector::normalized({m00 * s[0], std::sqrt(1.0 - eps) * s[1]});
    ASSERT_TRUE(br[0].post_state.has_value());
    EXPECT_EQ(br[0].post_state->num_qubits(), 1u);
    EXPECT_TRUE(equal_up_to_global_phase(*br[0].post_state, want0, kTol));
    if (br[1].post_state) {
      EXPECT_TRUE(equal_up_to_global_phase(*br[1].post_state, StateVector::basis_state(1, 1), kTol));
    }
  }
}

TEST(WeakMeter, ZeroStrengthLeavesStateAlone) {
  const auto s = StateVector::normalized({0.6, Complex(0.0, 0.8)});
  const auto br = weakmeas::weak_branches(s, 0, WeakStrength(0.0));
  EXPECT_NEAR(br[0].probability, 1.0, kTol);
  EXPECT_TRUE(equal_up_to_global_phase(*br[0].post_state, s, kTol));
}

TEST(WeakMeter, FullStrengthIsProjective) {
  const auto s = StateVector::normalized({0.6, 0.8});
  const auto br = weakmeas::weak_branches(s, 0, WeakStrength(1.0));
  EXPECT_NEAR(br[1].probability, 0.64, kTol);
  EXPECT_TRUE(equal_up_to_global_phase(*br[0].post_state, StateVector::basis_state(1, 0), kTol));
}

TEST(WeakMeter, ActsOnChosenQubitOfLargerState) {
  const auto s = tensor(StateVector::basis_state(1, 0), StateVector::basis_state(1, 1));
  const auto br = weakmeas::weak_branches(s, 1, WeakStrength(0.3));
  EXPECT_NEAR(br[1].probability, 0.3, kTol);
  EXPECT_EQ(br[1].post_state->num_qubits(), 2u);
  const auto untouched = weakmeas::weak_branches(s, 0, WeakStrength(0.3));
  EXPECT_NEAR(untouched[1].probability, 0.0, kTol);
}

TEST(WeakMeter, SampledOutcomesFollowBranches) {
  const auto s = StateVector::normalized({1.0, 1.0});
  const WeakMeter meter{WeakStrength(0.5)};
  Rng rng(2);
  int ones = 0;
  constexpr int n = 100000;
  for (int k = 0; k < n; ++k) {
    const auto out = meter.measure(s, 0, rng);
    ones += out.ancilla_bit;
    ASSERT_NEAR(out.probability_one, 0.25, kTol);
  }
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.25, 5.0 * std::sqrt(0.25 * 0.75 / n));
}

}  // namespace
