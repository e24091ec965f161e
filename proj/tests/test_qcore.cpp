#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include <rbelab/qcore.hpp>

namespace {

using namespace rbelab;

constexpr double kTol = 1e-12;

std::vector<Complex> random_amplitudes(std::size_t dim, Rng& rng) {
  std::vector<Complex> a(dim);
  for (auto& z : a) z = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return a;
}

StateVector random_state(std::size_t qubits, Rng& rng) {
  return StateVector::normalized(random_amplitudes(std::size_t{1} << qubits, rng));
}

Eigen::MatrixXcd random_unitary_matrix(std::size_t dim, Rng& rng) {
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ();
}

// Full operator of `gate` on `targets`, built element by element.
Eigen::MatrixXcd embed(const Eigen::MatrixXcd& gate, const std::vector<std::size_t>& targets, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t k = targets.size();
  auto bit = [n](std::size_t index, std::size_t q) { return (index >> (n - 1 - q)) & 1u; };
  std::size_t target_mask = 0;
  for (auto q : targets) target_mask |= std::size_t{1} << (n - 1 - q);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & ~target_mask) != (c & ~target_mask)) continue;
      std::size_t sr = 0;
      std::size_t sc = 0;
      for (std::size_t j = 0; j < k; ++j) {
        sr = (sr << 1) | bit(r, targets[j]);
        sc = (sc << 1) | bit(c, targets[j]);
      }
      full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          gate(static_cast<Eigen::Index>(sr), static_cast<Eigen::Index>(sc));
    }
  }
  return full;
}

Eigen::VectorXcd as_vector(const StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

TEST(StateVector, DefaultIsAllZeros) {
  StateVector s(3);
  EXPECT_EQ(s.dim(), 8u);
  EXPECT_EQ(s[0], Complex(1.0, 0.0));
  for (std::size_t i = 1; i < 8; ++i) EXPECT_EQ(s[i], Complex(0.0, 0.0));
}

TEST(StateVector, RejectsBadInput) {
  EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(StateVector::normalized({0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(StateVector(kMaxQubits + 1), CapacityError);
  EXPECT_THROW(StateVector::basis_state(2, 4), std::out_of_range);
}

TEST(StateVector, TensorIsBigEndian) {
  const auto s = tensor(StateVector::basis_state(1, 1), StateVector::basis_state(1, 0));
  EXPECT_EQ(s[2], Complex(1.0, 0.0));
  EXPECT_THROW(tensor(StateVector(5), StateVector(4)), CapacityError);
}

TEST(Gates, MatchTextbookMatrices) {
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(gates::h()(0, 0) - r), 0.0, kTol);
  EXPECT_NEAR(std::abs(gates::h()(1, 1) + r), 0.0, kTol);
  EXPECT_EQ(gates::x()(0, 1), Complex(1.0, 0.0));
  EXPECT_EQ(gates::y()(0, 1), Complex(0.0, -1.0));
  EXPECT_EQ(gates::z()(1, 1), Complex(-1.0, 0.0));
  EXPECT_EQ(gates::cnot()(3, 2), Complex(1.0, 0.0));
  EXPECT_EQ(gates::cnot()(2, 2), Complex(0.0, 0.0));
}

TEST(Gates, ControlledNotFlipsOnlyAllOnes) {
  for (std::size_t n = 0; n <= 4; ++n) {
    const auto g = gates::controlled_not(n);
    const std::size_t dim = std::size_t{1} << (n + 1);
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t want = c >= dim - 2 ? (c ^ 1u) : c;
      for (std::size_t r = 0; r < dim; ++r) EXPECT_EQ(g(r, c), Complex(r == want ? 1.0 : 0.0, 0.0));
    }
  }
}

TEST(Unitary, RejectsNonUnitary) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(Unitary::from_matrix(m), std::invalid_argument);
}

TEST(Apply, AgreesWithEmbeddedOperatorOnRandomInput) {
  Rng rng(11);
  const std::vector<std::vector<std::size_t>> target_sets{{0}, {3}, {1, 2}, {3, 0}, {2, 0, 3}, {1, 3}};
  for (int rep = 0; rep < 20; ++rep) {
    for (const auto& targets : target_sets) {
      const std::size_t n = 4;
      const auto state = random_state(n, rng);
      const auto u = random_unitary_matrix(std::size_t{1} << targets.size(), rng);
      const auto got = apply(state, Unitary::from_matrix(u), targets);
      const Eigen::VectorXcd want = embed(u, targets, n) * as_vector(state);
      ASSERT_LT((as_vector(got) - want).norm(), kTol);
    }
  }
}

TEST(Apply, PreservesNorm) {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = random_state(5, rng);
    const auto u = Unitary::from_matrix(random_unitary_matrix(8, rng));
    EXPECT_NEAR(apply(s, u, {4, 1, 2}).norm_squared(), 1.0, kTol);
  }
}

TEST(Apply, RejectsBadTargets) {
  StateVector s(2);
  EXPECT_THROW(apply(s, gates::cnot(), {0, 0}), std::invalid_argument);
  EXPECT_THROW(apply(s, gates::cnot(), {0, 2}), std::out_of_range);
  EXPECT_THROW(apply(s, gates::cnot(), {0}), std::invalid_argument);
}

TEST(Kron, MatchesEigenProductOrder) {
  const auto k = gates::x().kron(gates::z());
  // X on the high qubit, Z on the low qubit.
  EXPECT_EQ(k(2, 0), Complex(1.0, 0.0));
  EXPECT_EQ(k(3, 1), Complex(-1.0, 0.0));
}

TEST(Basis, ElementsMatchAngleFormula) {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const auto b = basis_from_angles(theta, phi);
    const Complex e = std::polar(1.0, phi);
    EXPECT_NEAR(std::abs(b.psi0()[0] - std::cos(theta / 2)), 0.0, kTol);
    EXPECT_NEAR(std::abs(b.psi0()[1] - e * std::sin(theta / 2)), 0.0, kTol);
    EXPECT_NEAR(std::abs(b.psi1()[0] - std::sin(theta / 2)), 0.0, kTol);
    EXPECT_NEAR(std::abs(b.psi1()[1] + e * std::cos(theta / 2)), 0.0, kTol);
    EXPECT_NEAR(std::abs(inner(b.state(0), b.state(1))), 0.0, kTol);
  }
  EXPECT_THROW(basis_from_angles(std::nan(""), 0.0), std::invalid_argument);
}

TEST(Basis, NamedBasesAreExact) {
  const auto c = OrthonormalBasis::computational();
  EXPECT_EQ(c.psi0()[0], Complex(1.0, 0.0));
  EXPECT_EQ(c.psi0()[1], Complex(0.0, 0.0));
  EXPECT_EQ(c.psi1()[1], Complex(1.0, 0.0));
  const auto h = OrthonormalBasis::hadamard();
  EXPECT_NEAR(std::abs(h.psi1()[1] + 1.0 / std::sqrt(2.0)), 0.0, kTol);
}

TEST(Measurement, BranchesFollowBornRule) {
  Rng rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = random_state(3, rng);
    const auto basis = basis_from_angles(rng.uniform() * 6.0, rng.uniform() * 6.0);
    const auto br = branches_in_basis(s, 1, basis);
    EXPECT_NEAR(br[0].probability + br[1].probability, 1.0, kTol);
    // Oracle: project with the embedded |psi_k><psi_k|.
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2cd psi(basis.element(k)[0], basis.element(k)[1]);
      const Eigen::MatrixXcd proj = embed(psi * psi.adjoint(), {1}, 3);
      const Eigen::VectorXcd v = proj * as_vector(s);
      EXPECT_NEAR(br[static_cast<std::size_t>(k)].probability, v.squaredNorm(), kTol);
      if (br[static_cast<std::size_t>(k)].post_state) {
        EXPECT_LT((as_vector(*br[static_cast<std::size_t>(k)].post_state) - v / v.norm()).norm(), 1e-10);
      }
    }
  }
}

TEST(Measurement, DiscardingRemovesQubit) {
  const auto s = tensor(StateVector::basis_state(1, 1), StateVector::normalized({1.0, 1.0}));
  const auto br = branches_discarding(s, 0);
  EXPECT_NEAR(br[1].probability, 1.0, kTol);
  EXPECT_FALSE(br[0].post_state.has_value());
  ASSERT_TRUE(br[1].post_state.has_value());
  EXPECT_EQ(br[1].post_state->num_qubits(), 1u);
}

TEST(Measurement, SampledFrequencyMatchesProbability) {
  const auto s = StateVector::normalized({1.0, Complex(0.0, 2.0)});
  Rng rng(15);
  int zeros = 0;
  constexpr int n = 100000;
  for (int k = 0; k < n; ++k) zeros += measure_in_basis(s, 0, OrthonormalBasis::computational(), rng).outcome == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.2, 5.0 * std::sqrt(0.16 / n));
}

TEST(Measurement, OutcomeDistributionSumsToOne) {
  Rng rng(16);
  const auto s = random_state(3, rng);
  std::vector<OrthonormalBasis> bases{OrthonormalBasis::hadamard(), OrthonormalBasis::computational(),
                                      basis_from_angles(1.0, 2.0)};
  const auto d = outcome_distribution(s, bases);
  ASSERT_EQ(d.size(), 8u);
  double sum = 0.0;
  for (double p : d) {
    EXPECT_GE(p, 0.0);
    sum += p;
  }
  EXPECT_NEAR(sum, 1.0, kTol);
}

TEST(Measurement, ObservableEigenvalueConvention) {
  Rng rng(17);
  const Eigen::MatrixXcd zz = gates::z().kron(gates::z()).matrix();
  const auto even = StateVector::basis_state(2, 3);
  const auto odd = StateVector::basis_state(2, 1);
  EXPECT_EQ(measure_observable(even, zz, std::vector<std::size_t>{0, 1}, rng).outcome, 0);
  EXPECT_EQ(measure_observable(odd, zz, std::vector<std::size_t>{0, 1}, rng).outcome, 1);
}

TEST(Comparison, GlobalPhaseIsInvisible) {
  Rng rng(18);
  const auto s = random_state(2, rng);
  std::vector<Complex> phased(s.amplitudes().begin(), s.amplitudes().end());
  for (auto& z : phased) z *= std::polar(1.0, 0.83);
  EXPECT_TRUE(equal_up_to_global_phase(s, StateVector::from_amplitudes(phased)));
  EXPECT_FALSE(equal_up_to_global_phase(StateVector::basis_state(1, 0), StateVector::normalized({1.0, 1.0})));
}

TEST(Density, PureStatePropertiesAndDistances) {
  Rng rng(19);
  const auto a = random_state(2, rng);
  const auto rho = density_of(a);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, kTol);
  EXPECT_NEAR(fidelity(rho, a), 1.0, kTol);
  EXPECT_NEAR(trace_distance(rho, rho), 0.0, kTol);
  EXPECT_NEAR(trace_distance(density_of(StateVector::basis_state(1, 0)), density_of(StateVector::basis_state(1, 1))),
              1.0, kTol);
}

TEST(Density, AverageOfComputationalStatesIsMixed) {
  std::vector<WeightedState> ws{{0.5, StateVector::basis_state(1, 0)}, {0.5, StateVector::basis_state(1, 1)}};
  EXPECT_NEAR(trace_distance(average_density(ws), DensityMatrix::maximally_mixed(1)), 0.0, kTol);
  std::vector<WeightedState> bad{{0.7, StateVector::basis_state(1, 0)}};
  EXPECT_THROW(average_density(bad), std::invalid_argument);
}

TEST(Density, PartialTraceOfBellStateIsMixed) {
  const auto bell = StateVector::normalized({1.0, 0.0, 0.0, 1.0});
  const std::array<std::size_t, 1> keep{1};
  EXPECT_NEAR(trace_distance(partial_trace(density_of(bell), keep), DensityMatrix::maximally_mixed(1)), 0.0, kTol);
}

TEST(Density, PartialTraceOfProductRecoversFactor) {
  Rng rng(20);
  const auto a = random_state(1, rng);
  const auto b = random_state(2, rng);
  const auto joint = density_of(tensor(a, b));
  const std::array<std::size_t, 2> keep_b{1, 2};
  EXPECT_NEAR(trace_distance(partial_trace(joint, keep_b), density_of(b)), 0.0, 1e-12);
  const std::array<std::size_t, 1> keep_a{0};
  EXPECT_NEAR(trace_distance(partial_trace(joint, keep_a), density_of(a)), 0.0, 1e-12);
}

TEST(Density, FromMatrixValidates) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityMatrix::from_matrix(m), std::invalid_argument);
}

TEST(Bloch, PlusStatePointsAlongX) {
  const auto v = bloch_vector(StateVector::normalized({1.0, 1.0}));
  EXPECT_NEAR(v[0], 1.0, kTol);
  EXPECT_NEAR(v[1], 0.0, kTol);
  EXPECT_NEAR(v[2], 0.0, kTol);
}

}  // namespace
