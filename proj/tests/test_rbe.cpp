#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <rbelab/rbe.hpp>

namespace {

using namespace rbelab;
using rbe::PhaseSign;
using rbe::RbeKey;

constexpr double kTol = 1e-12;
constexpr double kPi = std::numbers::pi;

// Ciphertext amplitudes written out directly from the key.
std::array<Complex, 2> expected_cipher(int bit, double theta, PhaseSign sign) {
  const Complex i_sign = sign == PhaseSign::plus ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  if (bit == 0) return {c, i_sign * s};
  return {s, -i_sign * c};
}

RbeKey random_key(Rng& rng) {
  return RbeKey(2.0 * kPi * rng.uniform(), rng.bit() ? PhaseSign::plus : PhaseSign::minus);
}

TEST(RbeKey, ValidatesTheta) {
  EXPECT_NO_THROW(RbeKey(0.0, PhaseSign::plus));
  EXPECT_NO_THROW(RbeKey(2.0 * kPi, PhaseSign::minus));
  EXPECT_THROW(RbeKey(-0.1, PhaseSign::plus), std::invalid_argument);
  EXPECT_THROW(RbeKey(7.0, PhaseSign::plus), std::invalid_argument);
  EXPECT_THROW(RbeKey(std::nan(""), PhaseSign::plus), std::invalid_argument);
  EXPECT_DOUBLE_EQ(RbeKey(1.0, PhaseSign::plus).phi(), kPi / 2);
  EXPECT_DOUBLE_EQ(RbeKey(1.0, PhaseSign::minus).phi(), -kPi / 2);
}

TEST(KeySpace, DescribesItself) {
  EXPECT_EQ(rbe::KeySpace::continuous().describe(), "continuous");
  EXPECT_EQ(rbe::KeySpace::discrete(64).describe(), "discrete:64");
  EXPECT_THROW(rbe::KeySpace::discrete(0), std::invalid_argument);
}

TEST(Gen, DiscreteKeysLieOnTheGrid) {
  Rng rng(1);
  const auto space = rbe::KeySpace::discrete(12);
  int plus = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto key = rbe::gen(space, rng);
    const double n = key.theta() * 12 / (2.0 * kPi);
    EXPECT_NEAR(n, std::round(n), 1e-9);
    EXPECT_GE(std::round(n), 1.0);
    EXPECT_LE(std::round(n), 12.0);
    plus += key.sign() == PhaseSign::plus;
  }
  EXPECT_NEAR(plus / 2000.0, 0.5, 0.06);
}

TEST(Gen, ContinuousKeysCoverTheRange) {
  Rng rng(2);
  double lo = 10.0;
  double hi = -1.0;
  for (int k = 0; k < 5000; ++k) {
    const double t = rbe::gen(rbe::KeySpace::continuous(), rng).theta();
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 2.0 * kPi - 0.01);
}

TEST(Enc, MatchesBasisFormula) {
  Rng rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    const auto key = random_key(rng);
    for (int b = 0; b <= 1; ++b) {
      const auto c = rbe::enc(b, key);
      const auto want = expected_cipher(b, key.theta(), key.sign());
      EXPECT_NEAR(std::abs(c.qubit[0] - want[0]), 0.0, kTol);
      EXPECT_NEAR(std::abs(c.qubit[1] - want[1]), 0.0, kTol);
    }
  }
  EXPECT_THROW(rbe::enc(2, RbeKey(1.0, PhaseSign::plus)), std::invalid_argument);
}

TEST(Dec, IsPerfectlyCorrect) {
  Rng rng(4);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto key = random_key(rng);
    const int b = rng.bit();
    const auto c = rbe::enc(b, key);
    EXPECT_EQ(rbe::dec(c, key, rng), b);
    const auto plain = rbe::decrypt_unmeasured(c, key);
    EXPECT_NEAR(std::abs(plain[static_cast<std::size_t>(1 - b)]), 0.0, kTol);
  }
}

TEST(EncryptionGate, IsUnitaryWithCipherColumns) {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const auto key = random_key(rng);
    const auto k = rbe::encryption_gate(key);
    for (int b = 0; b <= 1; ++b) {
      const auto want = expected_cipher(b, key.theta(), key.sign());
      EXPECT_NEAR(std::abs(k(0, static_cast<std::size_t>(b)) - want[0]), 0.0, kTol);
      EXPECT_NEAR(std::abs(k(1, static_cast<std::size_t>(b)) - want[1]), 0.0, kTol);
    }
  }
}

TEST(Homomorphic, NotSwapsCiphertexts) {
  Rng rng(6);
  for (int rep = 0; rep < 500; ++rep) {
    const auto key = random_key(rng);
    for (int b = 0; b <= 1; ++b) {
      const auto flipped = rbe::eval_not(rbe::enc(b, key));
      EXPECT_TRUE(equal_up_to_global_phase(flipped.qubit, rbe::enc(1 - b, key).qubit, kTol));
    }
  }
}

TEST(Homomorphic, NotFailsForGenericPhase) {
  // Only phi = +-pi/2 makes X swap the pair; phi = 0.4 is a negative control.
  const auto basis = basis_from_angles(1.1, 0.4);
  const auto flipped = apply(basis.state(0), gates::x(), {0});
  EXPECT_FALSE(equal_up_to_global_phase(flipped, basis.state(1), 1e-6));
}

TEST(Homomorphic, DGateGivesBalancedOutcomes) {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto key = random_key(rng);
    for (int b = 0; b <= 1; ++b) {
      const auto out = rbe::eval_d(rbe::enc(b, key));
      ASSERT_EQ(out.num_qubits(), 2u);
      const auto br = branches_in_basis(out, 1, key.basis());
      EXPECT_NEAR(br[0].probability, 0.5, kTol);
      // The ancilla is perfectly correlated with the ciphertext outcome.
      const std::vector<OrthonormalBasis> bases{OrthonormalBasis::computational(), key.basis()};
      const auto d = outcome_distribution(out, bases);
      EXPECT_NEAR(d[static_cast<std::size_t>(b)] + d[static_cast<std::size_t>(3 - b)], 1.0, kTol);
    }
  }
}

TEST(Homomorphic, CnotWithClearControl) {
  Rng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const auto key = random_key(rng);
    for (int b = 0; b <= 1; ++b) {
      for (int c = 0; c <= 1; ++c) {
        const auto want = tensor(StateVector::basis_state(1, static_cast<std::size_t>(c)), rbe::enc(b ^ c, key).qubit);
        EXPECT_TRUE(equal_up_to_global_phase(rbe::eval_cnot(c, rbe::enc(b, key)), want, kTol));
      }
    }
  }
}

TEST(Homomorphic, ManyControlsUpToCapacity) {
  Rng rng(9);
  const auto key = random_key(rng);
  for (std::size_t n = 1; n <= rbe::kMaxControls; ++n) {
    for (unsigned pattern = 0; pattern < (1u << n); ++pattern) {
      std::vector<int> controls(n);
      std::size_t index = 0;
      for (std::size_t q = 0; q < n; ++q) {
        controls[q] = static_cast<int>((pattern >> q) & 1u);
        index = (index << 1) | static_cast<std::size_t>(controls[q]);
      }
      const int flip = pattern == (1u << n) - 1 ? 1 : 0;
      const auto want = tensor(StateVector::basis_state(n, index), rbe::enc(1 ^ flip, key).qubit);
      EXPECT_TRUE(equal_up_to_global_phase(rbe::eval_cn_not(controls, rbe::enc(1, key)), want, kTol));
    }
  }
  const std::vector<int> too_many(rbe::kMaxControls + 1, 1);
  EXPECT_THROW(rbe::eval_cn_not(too_many, rbe::enc(0, key)), CapacityError);
}

TEST(Homomorphic, HadamardIsNotHomomorphic) {
  for (int k = 0; k <= 100; ++k) {
    const double theta = 2.0 * kPi * k / 100;
    for (auto sign : {PhaseSign::plus, PhaseSign::minus}) {
      const RbeKey key(theta, sign);
      const auto h_psi = apply(rbe::enc(0, key).qubit, gates::h(), {0});
      const double direct = fidelity(h_psi, rbe::enc(0, key).qubit);
      EXPECT_NEAR(rbe::hadamard_probe(key), direct, kTol);
      EXPECT_NEAR(rbe::hadamard_probe(key), std::pow(std::cos(theta), 2) / 2.0, kTol);
    }
  }
}

TEST(NoGo, PlainCnotViolatesConstraints) {
  const auto report = rbe::cnot_no_go_witness(gates::cnot());
  EXPECT_EQ(report.constraints.size(), 8u);
  EXPECT_TRUE(report.any_violated());
  EXPECT_FALSE(report.summary().empty());
}

TEST(NoGo, RandomUnitariesAllViolate) {
  Rng rng(10);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::MatrixXcd m(4, 4);
    for (Eigen::Index r = 0; r < 4; ++r) {
      for (Eigen::Index c = 0; c < 4; ++c) m(r, c) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    const auto u = Unitary::from_matrix(Eigen::MatrixXcd(qr.householderQ()));
    EXPECT_TRUE(rbe::cnot_no_go_witness(u).any_violated());
  }
  EXPECT_TRUE(rbe::cnot_no_go_witness(gates::identity(2)).any_violated());
  EXPECT_TRUE(rbe::cnot_no_go_witness(gates::swap()).any_violated());
}

TEST(Guessing, ClosedFormMatchesDirectOnRandomAngles) {
  Rng rng(11);
  for (int rep = 0; rep < 10000; ++rep) {
    const double theta = 2.0 * kPi * rng.uniform();
    const double phi = 2.0 * kPi * rng.uniform();
    const double theta0 = 2.0 * kPi * rng.uniform();
    const double phi0 = 2.0 * kPi * rng.uniform();
    // Independent oracle: raw complex arithmetic.
    const Complex a0(std::cos(theta0 / 2), 0.0);
    const Complex a1 = std::polar(std::sin(theta0 / 2), phi0);
    const Complex b0(std::cos(theta / 2), 0.0);
    const Complex b1 = std::polar(std::sin(theta / 2), phi);
    const double oracle = std::norm(std::conj(a0) * b0 + std::conj(a1) * b1);
    ASSERT_NEAR(rbe::lemma1_probability(theta, phi, theta0, phi0), oracle, kTol);
    ASSERT_NEAR(rbe::lemma1_direct(theta, phi, theta0, phi0), oracle, kTol);
  }
}

TEST(Guessing, KeyAverageIsOneHalfForAnyAdversary) {
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto adversary = basis_from_angles(2.0 * kPi * rng.uniform(), 2.0 * kPi * rng.uniform());
    for (std::uint64_t n : {3u, 17u, 256u}) {
      EXPECT_NEAR(rbe::lemma1_exact_average(adversary, n, 0), 0.5, kTol);
      EXPECT_NEAR(rbe::lemma1_exact_average(adversary, n, 1), 0.5, kTol);
    }
  }
}

TEST(Guessing, SingleKeySpaceLeaks) {
  EXPECT_NEAR(rbe::lemma1_exact_average(OrthonormalBasis::computational(), 1, 0), 1.0, kTol);
}

TEST(Guessing, MonteCarloScanIsUnbiased) {
  const auto adversary = basis_from_angles(0.7, 1.9);
  const auto scan = rbe::lemma1_scan(adversary, rbe::KeySpace::continuous(), 50000, Execution{21, 1});
  EXPECT_EQ(scan.trials, 50000u);
  EXPECT_NEAR(scan.p0_given_enc0(), 0.5, 4.0 * scan.stderr_enc0());
  EXPECT_NEAR(scan.p0_given_enc1(), 0.5, 4.0 * scan.stderr_enc1());
}

TEST(Guessing, ScanIndependentOfWorkers) {
  const auto adversary = OrthonormalBasis::hadamard();
  const auto a = rbe::lemma1_scan(adversary, rbe::KeySpace::discrete(64), 3001, Execution{5, 1});
  const auto b = rbe::lemma1_scan(adversary, rbe::KeySpace::discrete(64), 3001, Execution{5, 3});
  EXPECT_EQ(a.zeros_given_enc0, b.zeros_given_enc0);
  EXPECT_EQ(a.zeros_given_enc1, b.zeros_given_enc1);
}

TEST(KeyAveraging, EnumerationHasBothSigns) {
  const auto keys = rbe::enumerate_keys(5);
  ASSERT_EQ(keys.size(), 10u);
  int plus = 0;
  for (const auto& k : keys) plus += k.sign() == PhaseSign::plus;
  EXPECT_EQ(plus, 5);
}

TEST(KeyAveraging, DensitiesAreMaximallyMixed) {
  for (std::uint64_t n = 2; n <= 24; ++n) {
    const auto space = rbe::KeySpace::discrete(n);
    EXPECT_LT(rbe::density_gap(space), kTol) << n;
    EXPECT_NEAR(trace_distance(rbe::averaged_ciphertext(space, 0, 0), DensityMatrix::maximally_mixed(1)), 0.0,
                kTol);
  }
  EXPECT_LT(rbe::density_gap(rbe::KeySpace::continuous()), kTol);
}

TEST(KeyAveraging, SingleKeyIsPerfectlyDistinguishable) {
  EXPECT_NEAR(rbe::density_gap(rbe::KeySpace::discrete(1)), 1.0, kTol);
}

}  // namespace

namespace {

TEST(KeyGrid, LastAngleIsExactlyTwoPiForEveryGridSize) {
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    ASSERT_EQ(rbelab::rbe::grid_angle(n, n), 2.0 * std::numbers::pi) << n;
    ASSERT_NO_THROW(rbelab::rbe::enumerate_keys(n).back()) << n;
  }
}

}  // namespace
