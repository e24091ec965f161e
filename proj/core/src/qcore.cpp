#include "rbelab/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace rbelab {

namespace {

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::size_t log2_exact(std::size_t x) {
  return static_cast<std::size_t>(std::countr_zero(x));
}

void check_qubit_count(std::size_t n) {
  if (n == 0) throw std::invalid_argument("state needs at least one qubit");
  if (n > kMaxQubits) {
    throw CapacityError("state of " + std::to_string(n) + " qubits exceeds the " +
                        std::to_string(kMaxQubits) + "-qubit cap");
  }
}

double squared_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

// Bit position (from the least significant end) of qubit q in an n-qubit index.
std::size_t bit_of(std::size_t n, std::size_t q) { return n - 1 - q; }

void check_targets(std::size_t n, std::span<const std::size_t> targets) {
  if (targets.empty()) throw std::invalid_argument("no target qubits given");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= n) {
      throw std::out_of_range("target qubit " + std::to_string(targets[i]) +
                              " out of range for " + std::to_string(n) + " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate target qubit");
    }
  }
}

// out = (M acting on targets) * amps. M need not be unitary.
std::vector<Complex> apply_matrix(std::span<const Complex> amps, std::size_t n,
                                  const Eigen::MatrixXcd& m,
                                  std::span<const std::size_t> targets) {
  const std::size_t t = targets.size();
  const std::size_t k = std::size_t{1} << t;
  if (static_cast<std::size_t>(m.rows()) != k || static_cast<std::size_t>(m.cols()) != k) {
    throw std::invalid_argument("gate dimension " + std::to_string(m.rows()) +
                                " does not match " + std::to_string(t) + " target qubit(s)");
  }

  std::size_t mask = 0;
  std::array<std::size_t, 1u << kMaxQubits> offsets{};
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t off = 0;
    for (std::size_t q = 0; q < t; ++q) {
      if ((s >> (t - 1 - q)) & 1u) off |= std::size_t{1} << bit_of(n, targets[q]);
    }
    offsets[s] = off;
  }
  for (std::size_t q = 0; q < t; ++q) mask |= std::size_t{1} << bit_of(n, targets[q]);

  std::vector<Complex> out(amps.size());
  std::array<Complex, 1u << kMaxQubits> local{};
  for (std::size_t base = 0; base < amps.size(); ++base) {
    if (base & mask) continue;
    for (std::size_t s = 0; s < k; ++s) local[s] = amps[base | offsets[s]];
    for (std::size_t r = 0; r < k; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t s = 0; s < k; ++s) {
        acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * local[s];
      }
      out[base | offsets[r]] = acc;
    }
  }
  return out;
}

// Branch probabilities at or below this are treated as exactly zero.
constexpr double kZeroBranch = 1e-14;

Branch make_branch(std::vector<Complex> amps) {
  const double p = squared_norm(amps);
  if (p <= kZeroBranch) return Branch{0.0, std::nullopt};
  const double scale = 1.0 / std::sqrt(p);
  for (auto& a : amps) a *= scale;
  return Branch{p, StateVector::from_amplitudes(std::move(amps))};
}

Measurement sample(std::array<Branch, 2> branches, Rng& rng) {
  const double p0 = branches[0].probability;
  const double p1 = branches[1].probability;
  const double total = p0 + p1;
  const double p_zero = branches[0].post_state ? (branches[1].post_state ? p0 / total : 1.0) : 0.0;
  const int outcome = rng.uniform() < p_zero ? 0 : 1;
  auto& chosen = branches[static_cast<std::size_t>(outcome)];
  return Measurement{outcome, std::move(*chosen.post_state), p_zero};
}

}  // namespace

// --- StateVector --------------------------------------------------------------

StateVector::StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
  check_qubit_count(num_qubits);
  amplitudes_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
  amplitudes_[0] = 1.0;
}

StateVector StateVector::basis_state(std::size_t num_qubits, std::size_t index) {
  StateVector s(num_qubits);
  if (index >= s.dim()) throw std::out_of_range("basis index out of range");
  s.amplitudes_[0] = 0.0;
  s.amplitudes_[index] = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes, double tol) {
  if (!is_power_of_two(amplitudes.size()) || amplitudes.size() < 2) {
    throw std::invalid_argument("amplitude count must be a power of two >= 2");
  }
  const std::size_t n = log2_exact(amplitudes.size());
  check_qubit_count(n);
  for (const auto& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("non-finite amplitude");
    }
  }
  const double norm = squared_norm(amplitudes);
  if (std::abs(norm - 1.0) > tol) {
    throw std::invalid_argument("state is not normalized: squared norm " + std::to_string(norm));
  }
  return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::normalized(std::vector<Complex> amplitudes) {
  const double norm = squared_norm(amplitudes);
  if (!(norm > kZeroBranch)) throw std::invalid_argument("cannot normalize a zero vector");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : amplitudes) a *= scale;
  return from_amplitudes(std::move(amplitudes));
}

double StateVector::norm_squared() const { return squared_norm(amplitudes_); }

// --- Unitary ------------------------------------------------------------------

Unitary Unitary::from_matrix(Eigen::MatrixXcd m, double tol) {
  const auto rows = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols() || !is_power_of_two(rows) || rows < 2) {
    throw std::invalid_argument("unitary must be square with power-of-two dimension >= 2");
  }
  if (log2_exact(rows) > kMaxQubits) throw CapacityError("gate exceeds the qubit cap");
  if (!m.allFinite()) throw std::invalid_argument("gate has non-finite entries");
  const Eigen::MatrixXcd residual =
      m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  const double worst = residual.cwiseAbs().maxCoeff();
  if (worst > tol) {
    throw std::invalid_argument("matrix is not unitary: max |U^dagger U - I| = " +
                                std::to_string(worst));
  }
  return Unitary(std::move(m));
}

std::size_t Unitary::num_qubits() const { return log2_exact(dim()); }

Unitary Unitary::operator*(const Unitary& rhs) const {
  if (dim() != rhs.dim()) throw std::invalid_argument("gate dimension mismatch");
  return Unitary(m_ * rhs.m_);
}

Unitary Unitary::kron(const Unitary& rhs) const {
  if (num_qubits() + rhs.num_qubits() > kMaxQubits) throw CapacityError("gate exceeds the qubit cap");
  const Eigen::Index da = m_.rows();
  const Eigen::Index db = rhs.m_.rows();
  Eigen::MatrixXcd out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = m_(i, j) * rhs.m_;
  }
  return Unitary(std::move(out));
}

Unitary Unitary::phased(Complex phase) const {
  if (std::abs(std::abs(phase) - 1.0) > kAmplitudeTol) {
    throw std::invalid_argument("global phase must have unit modulus");
  }
  return Unitary(m_ * phase);
}

namespace gates {

namespace {
Unitary make(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd m(n, n);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (const auto& v : row) m(r, c++) = v;
    ++r;
  }
  return Unitary::from_matrix(std::move(m));
}
}  // namespace

const Unitary& identity1() {
  static const Unitary g = make({{1, 0}, {0, 1}});
  return g;
}
const Unitary& x() {
  static const Unitary g = make({{0, 1}, {1, 0}});
  return g;
}
const Unitary& y() {
  static const Unitary g = make({{0, Complex(0, -1)}, {Complex(0, 1), 0}});
  return g;
}
const Unitary& z() {
  static const Unitary g = make({{1, 0}, {0, -1}});
  return g;
}
const Unitary& h() {
  const double r = std::numbers::sqrt2 / 2.0;
  static const Unitary g = make({{r, r}, {r, -r}});
  return g;
}
const Unitary& cnot() {
  static const Unitary g = make({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
  return g;
}
const Unitary& swap() {
  static const Unitary g = make({{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
  return g;
}

Unitary controlled_not(std::size_t num_controls) {
  if (num_controls + 1 > kMaxQubits) throw CapacityError("C^nNOT exceeds the qubit cap");
  const Eigen::Index dim = Eigen::Index{1} << (num_controls + 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  m(dim - 2, dim - 2) = 0.0;
  m(dim - 1, dim - 1) = 0.0;
  m(dim - 2, dim - 1) = 1.0;
  m(dim - 1, dim - 2) = 1.0;
  return Unitary::from_matrix(std::move(m));
}

Unitary identity(std::size_t num_qubits) {
  check_qubit_count(num_qubits);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  return Unitary::from_matrix(Eigen::MatrixXcd::Identity(dim, dim));
}

}  // namespace gates

// --- bases --------------------------------------------------------------------

OrthonormalBasis basis_from_angles(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::invalid_argument("basis angles must be finite");
  }
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Complex e = std::polar(1.0, phi);
  return OrthonormalBasis(theta, phi, {{{c, e * s}, {s, -e * c}}});
}

OrthonormalBasis OrthonormalBasis::computational() {
  return OrthonormalBasis(0.0, std::numbers::pi, {{{1.0, 0.0}, {0.0, 1.0}}});
}

OrthonormalBasis OrthonormalBasis::hadamard() {
  const double r = std::numbers::sqrt2 / 2.0;
  return OrthonormalBasis(std::numbers::pi / 2.0, 0.0, {{{r, r}, {r, -r}}});
}

StateVector OrthonormalBasis::state(int k) const {
  const auto& v = element(k);
  return StateVector::from_amplitudes({v[0], v[1]});
}

// --- DensityMatrix ------------------------------------------------------------

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd m) {
  const auto rows = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols() || !is_power_of_two(rows) || rows < 2) {
    throw std::invalid_argument("density matrix must be square with power-of-two dimension");
  }
  if (log2_exact(rows) > kMaxQubits) throw CapacityError("density matrix exceeds the qubit cap");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - Complex(1.0, 0.0)) > kAmplitudeTol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
  return DensityMatrix(std::move(m), detail::TrustedTag{});
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t num_qubits) {
  check_qubit_count(num_qubits);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim),
                       detail::TrustedTag{});
}

std::size_t DensityMatrix::num_qubits() const { return log2_exact(dim()); }

// --- construction & evolution -------------------------------------------------

StateVector tensor(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() + b.num_qubits() > kMaxQubits) {
    throw CapacityError("tensor product of " + std::to_string(a.num_qubits()) + " and " +
                        std::to_string(b.num_qubits()) + " qubits exceeds the cap");
  }
  std::vector<Complex> out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  }
  return StateVector::from_amplitudes(std::move(out));
}

StateVector apply(const StateVector& state, const Unitary& gate,
                  std::span<const std::size_t> targets) {
  check_targets(state.num_qubits(), targets);
  return StateVector::from_amplitudes(
      apply_matrix(state.amplitudes(), state.num_qubits(), gate.matrix(), targets));
}

StateVector apply(const StateVector& state, const Unitary& gate,
                  std::initializer_list<std::size_t> targets) {
  return apply(state, gate, std::span<const std::size_t>(targets.begin(), targets.size()));
}

// --- measurement --------------------------------------------------------------

std::array<Branch, 2> branches_in_basis(const StateVector& state, std::size_t qubit,
                                        const OrthonormalBasis& basis) {
  const std::size_t n = state.num_qubits();
  if (qubit >= n) throw std::out_of_range("measured qubit out of range");
  const std::size_t bit = std::size_t{1} << bit_of(n, qubit);
  auto amps = state.amplitudes();

  std::array<Branch, 2> out{Branch{0.0, std::nullopt}, Branch{0.0, std::nullopt}};
  for (int k = 0; k < 2; ++k) {
    const auto& psi = basis.element(k);
    std::vector<Complex> projected(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (i & bit) continue;
      const Complex coeff = std::conj(psi[0]) * amps[i] + std::conj(psi[1]) * amps[i | bit];
      projected[i] = psi[0] * coeff;
      projected[i | bit] = psi[1] * coeff;
    }
    out[static_cast<std::size_t>(k)] = make_branch(std::move(projected));
  }
  return out;
}

Measurement measure_in_basis(const StateVector& state, std::size_t qubit,
                             const OrthonormalBasis& basis, Rng& rng) {
  return sample(branches_in_basis(state, qubit, basis), rng);
}

std::array<Branch, 2> branches_discarding(const StateVector& state, std::size_t qubit) {
  const std::size_t n = state.num_qubits();
  if (qubit >= n) throw std::out_of_range("measured qubit out of range");
  if (n < 2) throw std::invalid_argument("cannot discard the only qubit of a state");
  const std::size_t pos = bit_of(n, qubit);
  const std::size_t low_mask = (std::size_t{1} << pos) - 1;
  auto amps = state.amplitudes();

  std::array<Branch, 2> out{Branch{0.0, std::nullopt}, Branch{0.0, std::nullopt}};
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<Complex> reduced(amps.size() / 2);
    for (std::size_t j = 0; j < reduced.size(); ++j) {
      const std::size_t full = ((j & ~low_mask) << 1) | (k << pos) | (j & low_mask);
      reduced[j] = amps[full];
    }
    out[k] = make_branch(std::move(reduced));
  }
  return out;
}

std::vector<double> outcome_distribution(const StateVector& state,
                                         std::span<const OrthonormalBasis> basis_per_qubit) {
  const std::size_t n = state.num_qubits();
  if (basis_per_qubit.size() != n) {
    throw std::invalid_argument("outcome_distribution needs exactly one basis per qubit");
  }
  std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
  for (std::size_t q = 0; q < n; ++q) {
    const auto& b = basis_per_qubit[q];
    Eigen::MatrixXcd change(2, 2);
    change << std::conj(b.psi0()[0]), std::conj(b.psi0()[1]), std::conj(b.psi1()[0]),
        std::conj(b.psi1()[1]);
    const std::size_t target[1] = {q};
    amps = apply_matrix(amps, n, change, target);
  }
  std::vector<double> probs(amps.size());
  std::transform(amps.begin(), amps.end(), probs.begin(), [](Complex a) { return std::norm(a); });
  return probs;
}

Measurement measure_observable(const StateVector& state, const Eigen::MatrixXcd& observable,
                               std::span<const std::size_t> targets, Rng& rng) {
  check_targets(state.num_qubits(), targets);
  const Eigen::Index dim = observable.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  if (observable.cols() != dim || (observable - observable.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol ||
      (observable * observable - id).cwiseAbs().maxCoeff() > kUnitarityTol) {
    throw std::invalid_argument("observable must be Hermitian with eigenvalues +1/-1");
  }
  const Eigen::MatrixXcd plus = (id + observable) / 2.0;
  const Eigen::MatrixXcd minus = (id - observable) / 2.0;
  const std::size_t n = state.num_qubits();
  std::array<Branch, 2> branches{make_branch(apply_matrix(state.amplitudes(), n, plus, targets)),
                                 make_branch(apply_matrix(state.amplitudes(), n, minus, targets))};
  return sample(std::move(branches), rng);
}

// --- comparison ---------------------------------------------------------------

Complex inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner product of states of different size");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

bool equal_up_to_global_phase(const StateVector& a, const StateVector& b, double tol) {
  return std::abs(inner(a, b)) >= 1.0 - tol;
}

// --- densities ----------------------------------------------------------------

namespace {
Eigen::VectorXcd as_vector(const StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}
}  // namespace

DensityMatrix density_of(const StateVector& state) {
  const Eigen::VectorXcd v = as_vector(state);
  return DensityMatrix(v * v.adjoint(), detail::TrustedTag{});
}

DensityMatrix average_density(std::span<const WeightedState> states) {
  if (states.empty()) throw std::invalid_argument("empty ensemble");
  const auto dim = static_cast<Eigen::Index>(states.front().state.dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  double total = 0.0;
  for (const auto& ws : states) {
    if (static_cast<Eigen::Index>(ws.state.dim()) != dim) {
      throw std::invalid_argument("ensemble states differ in size");
    }
    if (!(ws.weight >= 0.0)) throw std::invalid_argument("negative ensemble weight");
    const Eigen::VectorXcd v = as_vector(ws.state);
    acc.noalias() += ws.weight * (v * v.adjoint());
    total += ws.weight;
  }
  if (std::abs(total - 1.0) > kEnsembleWeightTol) {
    throw std::invalid_argument("invalid ensemble: weights sum to " + std::to_string(total));
  }
  return DensityMatrix(std::move(acc), detail::TrustedTag{});
}

DensityMatrix average_densities(std::span<const DensityMatrix> densities) {
  if (densities.empty()) throw std::invalid_argument("empty ensemble");
  const auto dim = static_cast<Eigen::Index>(densities.front().dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& d : densities) {
    if (static_cast<Eigen::Index>(d.dim()) != dim) throw std::invalid_argument("density size mismatch");
    acc += d.matrix();
  }
  acc /= static_cast<double>(densities.size());
  return DensityMatrix(std::move(acc), detail::TrustedTag{});
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace distance of densities of different size");
  const Eigen::MatrixXcd diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double fidelity(const DensityMatrix& rho, const StateVector& psi) {
  if (rho.dim() != psi.dim()) throw std::invalid_argument("fidelity size mismatch");
  const Eigen::VectorXcd v = as_vector(psi);
  return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const std::size_t n = rho.num_qubits();
  check_targets(n, keep);
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  }
  auto split = [&](std::size_t index, std::size_t& kept_part, std::size_t& traced_part) {
    kept_part = 0;
    traced_part = 0;
    for (std::size_t q : keep) kept_part = (kept_part << 1) | ((index >> bit_of(n, q)) & 1u);
    for (std::size_t q : traced) traced_part = (traced_part << 1) | ((index >> bit_of(n, q)) & 1u);
  };
  const auto out_dim = Eigen::Index{1} << keep.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
  const std::size_t dim = rho.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t ki, ti;
    split(i, ki, ti);
    for (std::size_t j = 0; j < dim; ++j) {
      std::size_t kj, tj;
      split(j, kj, tj);
      if (ti == tj) out(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj)) += rho(i, j);
    }
  }
  return DensityMatrix(std::move(out), detail::TrustedTag{});
}

std::array<double, 3> bloch_vector(const StateVector& qubit) {
  if (qubit.num_qubits() != 1) throw std::invalid_argument("bloch_vector needs a single qubit");
  const Complex cross = std::conj(qubit[0]) * qubit[1];
  return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(qubit[0]) - std::norm(qubit[1])};
}

}  // namespace rbelab
