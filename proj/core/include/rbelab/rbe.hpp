#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbelab/parallel.hpp"
#include "rbelab/qcore.hpp"
#include "rbelab/rng.hpp"

// Random-basis encryption of single bits: a key (theta, phi) with
// phi = +-pi/2 selects the basis B(theta, phi); bit b is encrypted as the
// b-th basis element.

namespace rbelab::rbe {

enum class PhaseSign { plus, minus };

class RbeKey {
 public:
  /// Throws std::invalid_argument unless theta is finite and in [0, 2pi].
  RbeKey(double theta, PhaseSign sign);

  double theta() const { return theta_; }
  PhaseSign sign() const { return sign_; }
  /// +pi/2 or -pi/2.
  double phi() const;
  OrthonormalBasis basis() const { return basis_from_angles(theta_, phi()); }

  friend bool operator==(const RbeKey&, const RbeKey&) = default;

 private:
  double theta_;
  PhaseSign sign_;
};

class KeySpace {
 public:
  enum class Mode { continuous, discrete };

  /// theta uniform on [0, 2pi).
  static KeySpace continuous() { return KeySpace(Mode::continuous, 0); }
  /// theta uniform on {2 pi n / N : n = 1..N}. Throws on N = 0.
  static KeySpace discrete(std::uint64_t n);

  Mode mode() const { return mode_; }
  /// Grid size; 0 in continuous mode.
  std::uint64_t size() const { return n_; }
  std::string describe() const;

 private:
  KeySpace(Mode mode, std::uint64_t n) : mode_(mode), n_(n) {}
  Mode mode_;
  std::uint64_t n_;
};

inline constexpr std::uint64_t kDefaultGridSize = 4096;

struct Ciphertext {
  StateVector qubit;
};

RbeKey gen(const KeySpace& space, Rng& rng);
/// The 2x2 gate K whose columns are psi0 and psi1 of the key's basis.
Unitary encryption_gate(const RbeKey& key);
Ciphertext enc(int bit, const RbeKey& key);
/// Applies K^dagger and measures in the computational basis.
int dec(const Ciphertext& c, const RbeKey& key, Rng& rng);
/// K^dagger applied to the ciphertext, before measurement.
StateVector decrypt_unmeasured(const Ciphertext& c, const RbeKey& key);

// --- homomorphic evaluation ---------------------------------------------------

Ciphertext eval_not(const Ciphertext& c);
/// D = CNOT (H x I).
const Unitary& d_gate();
/// Prepends a fresh |0> ancilla as qubit 0 and applies D.
StateVector eval_d(const Ciphertext& c);
/// CNOT on |control_bit> x c; the ciphertext is qubit 1.
StateVector eval_cnot(int control_bit, const Ciphertext& c);
/// C^n NOT with cleartext controls (n <= 4) on qubits 0..n-1 and the
/// ciphertext as qubit n.
StateVector eval_cn_not(std::span<const int> control_bits, const Ciphertext& c);
inline constexpr std::size_t kMaxControls = 4;

/// P(0) when H psi0 is measured in the key's basis; equals cos^2(theta)/2.
double hadamard_probe(const RbeKey& key);

// --- CNOT no-go ---------------------------------------------------------------

/// One requirement on a candidate ciphertext-domain CNOT: for the key
/// (theta, phi) applied to both wires, P|psi_c psi_t> must equal
/// |psi_c psi_{c xor t}> up to phase.
struct NoGoConstraint {
  double theta;
  double phi;
  int control_bit;
  int target_bit;
  double fidelity;
  bool satisfied;
};

struct NoGoReport {
  std::vector<NoGoConstraint> constraints;

  bool any_violated() const;
  std::vector<NoGoConstraint> violated() const;
  std::string summary() const;
};

/// Checks `candidate` against the requirements at the two key settings
/// (theta, phi) = (0, pi) and (pi, 0). No 4x4 unitary satisfies all of them.
NoGoReport cnot_no_go_witness(const Unitary& candidate);

// --- security statements ------------------------------------------------------

/// Closed form of |<psi0(theta0, phi0)|psi0(theta, phi)>|^2.
double lemma1_probability(double theta, double phi, double theta0, double phi0);
/// The same probability by direct inner product.
double lemma1_direct(double theta, double phi, double theta0, double phi0);

struct Lemma1Scan {
  std::uint64_t trials;
  std::uint64_t zeros_given_enc0;
  std::uint64_t zeros_given_enc1;

  double p0_given_enc0() const;
  double p0_given_enc1() const;
  double stderr_enc0() const;
  double stderr_enc1() const;
};

/// Monte Carlo: for each trial draw a key, encrypt 0 and 1, and measure both
/// ciphertexts in the adversary's basis.
Lemma1Scan lemma1_scan(const OrthonormalBasis& adversary, const KeySpace& space,
                       std::uint64_t trials, const Execution& exec);

/// Exact key average of P(outcome 0 | Enc(bit)) over a discrete key space.
double lemma1_exact_average(const OrthonormalBasis& adversary, std::uint64_t grid_size, int bit);

/// All 2N keys of the discrete space K_N.
/// 2 pi n / N, with n = N giving exactly 2 pi.
double grid_angle(std::uint64_t n, std::uint64_t grid_size);
std::vector<RbeKey> enumerate_keys(std::uint64_t grid_size);

/// Average density of Enc(bit) over the key space. Continuous mode uses a
/// uniform theta grid of `resolution` points; discrete mode sums exactly.
DensityMatrix averaged_ciphertext(const KeySpace& space, int bit, std::uint64_t resolution);

/// Trace distance between the averaged Enc(0) and Enc(1) densities.
double density_gap(const KeySpace& space, std::uint64_t resolution = kDefaultGridSize);

}  // namespace rbelab::rbe
