#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rbelab/rng.hpp"

// Dense complex statevector kernels for 1-8 qubits.
//
// Amplitude indexing is big-endian over the qubit list: qubit 0 is the most
// significant bit of the computational-basis index. For a 2-qubit state,
// index 2 is |10>, i.e. qubit 0 set and qubit 1 clear.

namespace rbelab {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 8;

// Named tolerances.
inline constexpr double kAmplitudeTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEnsembleWeightTol = 1e-9;

/// Thrown when an operation would exceed kMaxQubits.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class StateVector {
 public:
  /// |0...0> on `num_qubits` qubits.
  explicit StateVector(std::size_t num_qubits);

  static StateVector basis_state(std::size_t num_qubits, std::size_t index);
  /// Takes ownership of `amplitudes`; size must be a power of two and the
  /// squared norm must be 1 within `tol`.
  static StateVector from_amplitudes(std::vector<Complex> amplitudes,
                                     double tol = kAmplitudeTol);
  /// Rescales `amplitudes` to unit norm. Throws if the norm is numerically 0.
  static StateVector normalized(std::vector<Complex> amplitudes);
  static StateVector qubit(Complex a0, Complex a1) {
    return from_amplitudes({a0, a1});
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  double norm_squared() const;

 private:
  StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
      : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

  std::size_t num_qubits_;
  std::vector<Complex> amplitudes_;
};

/// Square matrix that was verified unitary (U^dagger U = I within
/// kUnitarityTol entrywise) when it was built.
class Unitary {
 public:
  static Unitary from_matrix(Eigen::MatrixXcd m, double tol = kUnitarityTol);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const;
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return m_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  Unitary adjoint() const { return Unitary(m_.adjoint()); }
  Unitary operator*(const Unitary& rhs) const;
  /// Kronecker product; `*this` acts on the high-order qubits.
  Unitary kron(const Unitary& rhs) const;
  /// Scalar multiple by a unit-modulus phase.
  Unitary phased(Complex phase) const;

 private:
  explicit Unitary(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  Eigen::MatrixXcd m_;
};

namespace gates {
const Unitary& identity1();
const Unitary& x();
const Unitary& y();
const Unitary& z();
const Unitary& h();
const Unitary& cnot();
const Unitary& swap();
/// C^n NOT on n+1 qubits: the last qubit is the target.
Unitary controlled_not(std::size_t num_controls);
Unitary identity(std::size_t num_qubits);
}  // namespace gates

/// The basis {psi0, psi1} with psi0 = (cos(theta/2), e^{i phi} sin(theta/2))
/// and psi1 = (sin(theta/2), -e^{i phi} cos(theta/2)).
class OrthonormalBasis {
 public:
  /// B(0, pi) = {|0>, |1>}.
  static OrthonormalBasis computational();
  /// B(pi/2, 0) = {|+>, |->}.
  static OrthonormalBasis hadamard();

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  const std::array<Complex, 2>& psi0() const { return psi_[0]; }
  const std::array<Complex, 2>& psi1() const { return psi_[1]; }
  const std::array<Complex, 2>& element(int k) const { return psi_.at(static_cast<std::size_t>(k)); }
  StateVector state(int k) const;

 private:
  friend OrthonormalBasis basis_from_angles(double theta, double phi);
  OrthonormalBasis(double theta, double phi, std::array<std::array<Complex, 2>, 2> psi)
      : theta_(theta), phi_(phi), psi_(psi) {}

  double theta_;
  double phi_;
  std::array<std::array<Complex, 2>, 2> psi_;
};

/// Throws std::invalid_argument on non-finite angles.
OrthonormalBasis basis_from_angles(double theta, double phi);

namespace detail {
struct TrustedTag {
  explicit TrustedTag() = default;
};
}  // namespace detail

/// Hermitian, unit-trace, positive-semidefinite matrix.
class DensityMatrix {
 public:
  /// Validates all three properties; throws std::invalid_argument.
  static DensityMatrix from_matrix(Eigen::MatrixXcd m);
  /// Skips validation. For kernels whose output is a density by construction.
  DensityMatrix(Eigen::MatrixXcd m, detail::TrustedTag) : m_(std::move(m)) {}
  static DensityMatrix maximally_mixed(std::size_t num_qubits);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const;
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return m_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

 private:
  Eigen::MatrixXcd m_;
};

struct WeightedState {
  double weight;
  StateVector state;
};

// --- construction -----------------------------------------------------------

/// Kronecker product; `a` occupies the high-order qubits.
StateVector tensor(const StateVector& a, const StateVector& b);

// --- evolution --------------------------------------------------------------

/// Applies `gate` to the listed qubits; the first listed qubit is the gate's
/// most significant qubit.
StateVector apply(const StateVector& state, const Unitary& gate,
                  std::span<const std::size_t> targets);
StateVector apply(const StateVector& state, const Unitary& gate,
                  std::initializer_list<std::size_t> targets);

// --- measurement ------------------------------------------------------------

struct Measurement {
  int outcome;
  StateVector post_state;
  double probability_zero;
};

/// One branch of a projective measurement. `post_state` is empty when the
/// branch probability is numerically zero.
struct Branch {
  double probability;
  std::optional<StateVector> post_state;
};

/// Exact branches of measuring `qubit` against `basis`; post-states keep the
/// measured qubit, collapsed onto the basis element.
std::array<Branch, 2> branches_in_basis(const StateVector& state, std::size_t qubit,
                                        const OrthonormalBasis& basis);

/// Samples one branch of branches_in_basis.
Measurement measure_in_basis(const StateVector& state, std::size_t qubit,
                             const OrthonormalBasis& basis, Rng& rng);

/// Exact branches of a computational-basis measurement of `qubit`, with the
/// measured qubit removed from the post-state.
std::array<Branch, 2> branches_discarding(const StateVector& state, std::size_t qubit);

/// Probability table over bit strings (big-endian, one basis per qubit).
std::vector<double> outcome_distribution(const StateVector& state,
                                         std::span<const OrthonormalBasis> basis_per_qubit);

/// Measures a two-outcome observable with eigenvalues +1/-1 acting on
/// `targets`. Outcome 0 means eigenvalue +1.
Measurement measure_observable(const StateVector& state, const Eigen::MatrixXcd& observable,
                               std::span<const std::size_t> targets, Rng& rng);

// --- comparison -------------------------------------------------------------

/// <a|b>
Complex inner(const StateVector& a, const StateVector& b);
/// |<a|b>|^2
double fidelity(const StateVector& a, const StateVector& b);
/// True iff |<a|b>| >= 1 - tol.
bool equal_up_to_global_phase(const StateVector& a, const StateVector& b,
                              double tol = kAmplitudeTol);

// --- densities --------------------------------------------------------------

DensityMatrix density_of(const StateVector& state);
/// Weighted sum of pure-state densities; weights must sum to 1 within
/// kEnsembleWeightTol.
DensityMatrix average_density(std::span<const WeightedState> states);
/// Uniform average of density matrices.
DensityMatrix average_densities(std::span<const DensityMatrix> densities);
/// Half the sum of absolute eigenvalues of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
/// <psi|rho|psi>
double fidelity(const DensityMatrix& rho, const StateVector& psi);
/// Reduced density on the kept qubits (in the listed order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Bloch coordinates (x, y, z) of a single-qubit state. Debugging aid.
std::array<double, 3> bloch_vector(const StateVector& qubit);

}  // namespace rbelab
