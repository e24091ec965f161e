#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rbelab/parallel.hpp"
#include "rbelab/qcore.hpp"
#include "rbelab/rbe.hpp"
#include "rbelab/rng.hpp"

// Locking halves of EPR pairs with a quantum one-time pad or with RBE keys,
// theft and recovery experiments, and the Mermin-Peres magic square game used
// to measure what a (possibly locked) entangled resource is worth.

namespace rbelab::entangle {

/// (|00> + |11>) / sqrt(2).
const StateVector& phi_plus();

struct EprPair {
  StateVector state;
  static EprPair fresh() { return EprPair{phi_plus()}; }
};

/// Pad X^{x} Z^{z} for one qubit.
struct QotpKey {
  int x = 0;
  int z = 0;
  static QotpKey random(Rng& rng);
  friend bool operator==(const QotpKey&, const QotpKey&) = default;
};

Unitary qotp_gate(QotpKey key);

/// Alice's pad on qubit 0, Bob's on qubit 1.
EprPair qotp_lock(const EprPair& pair, QotpKey alice, QotpKey bob);
EprPair qotp_unlock(const EprPair& pair, QotpKey alice, QotpKey bob);
/// Encryption gates K_a on qubit 0 and K_b on qubit 1.
EprPair rbe_lock(const EprPair& pair, const rbe::RbeKey& alice, const rbe::RbeKey& bob);
EprPair rbe_unlock(const EprPair& pair, const rbe::RbeKey& alice, const rbe::RbeKey& bob);

/// Average of the QOTP-locked density over all 16 key pairs.
DensityMatrix qotp_ensemble(const EprPair& pair);
/// Average of the RBE-locked density over the grid of `key_space`
/// (kDefaultGridSize points in continuous mode), both halves independently.
DensityMatrix rbe_ensemble(const EprPair& pair, const rbe::KeySpace& key_space);

// --- theft and recovery ---------------------------------------------------------

enum class LockScheme { qotp, rbe };

struct TheftConfig {
  LockScheme scheme = LockScheme::qotp;
  /// RBE lock keys.
  rbe::KeySpace key_space = rbe::KeySpace::continuous();
  /// RBE guesses are uniform over K_G for this G.
  std::uint64_t guess_grid = 16;
  /// Recovery succeeds when the fidelity with phi+ reaches this value.
  double fidelity_threshold = 1.0 - 1e-9;

  void validate() const;
};

struct TheftResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  /// Exhaustive value over every (key, guess) combination, when affordable.
  std::optional<double> oracle;
  /// The rate quoted for key guessing: 1/16 for the pad, 0 for RBE.
  double quoted = 0.0;

  double rate() const;
  double stderr_rate() const;
};

/// Each trial locks a fresh pair with random keys; the thieves guess both keys
/// and apply the inverse lock.
TheftResult theft_recovery_experiment(const TheftConfig& config, std::uint64_t trials,
                                      const Execution& exec);

/// Exhaustive recovery rate, or empty when the enumeration exceeds the budget
/// (always empty for a continuous key space).
std::optional<double> theft_recovery_oracle(const TheftConfig& config);

// --- secure sharing ---------------------------------------------------------------

enum class Interception { none, without_key, leaked_key };

struct SharingReport {
  /// Fidelity with phi+ of Alice's half and the transit half after this run.
  double holder_fidelity = 0.0;
  /// Key-averaged fidelity with phi+ of the same joint state.
  double mean_holder_fidelity = 0.0;
  /// Trace distance of the key-averaged transit qubit from I/2.
  double transit_distance_to_mixed = 0.0;
  /// Trace distance of the key-averaged joint state from I/4.
  double joint_distance_to_mixed = 0.0;
  /// Win rate of whoever holds the transit halves of two shared pairs.
  std::optional<double> magic_square_win_rate;
};

/// Generate phi+, lock both halves, send the second half, reveal the key over
/// the secure channel, unlock. An interceptor keeps the transit half; the
/// transit half is unlocked only if its key reached the holder.
SharingReport secure_epr_sharing(Interception mode, const rbe::KeySpace& key_space,
                                 std::uint64_t magic_square_plays, const Execution& exec);

// --- magic square -----------------------------------------------------------------

/// 1/2 (|0011> - |0110> - |1001> + |1100>). Alice holds qubits 0, 1 and Bob
/// holds qubits 2, 3.
struct FourQubitResource {
  StateVector state;
  static FourQubitResource canonical();
};

/// Rows and columns are numbered 1..3.
struct MagicSquareInstance {
  int i;
  int j;
  std::array<int, 3> alice_row;
  std::array<int, 3> bob_col;
  bool win;
};

/// Alice's observable for square cell (i, j), 1-based, on her two qubits.
Eigen::MatrixXcd alice_observable(int i, int j);
/// Bob's observable for cell (i, j): (Y x Y) A_ij (Y x Y).
Eigen::MatrixXcd bob_observable(int i, int j);

/// One round: Alice measures row i, Bob column j; outcome bit 0 is eigenvalue +1.
MagicSquareInstance magic_square_play(const FourQubitResource& resource, int i, int j, Rng& rng);

struct ClassicalBound {
  std::uint64_t strategy_pairs;
  std::uint64_t inputs;
  std::uint64_t best_wins;
  double max_probability;
  bool perfect_strategy_found;
};

/// Exhaustive search over deterministic parity-respecting strategies.
ClassicalBound magic_square_classical_bound();

enum class ResourceLock { none, qotp_unknown_keys, rbe_unknown_keys, rbe_unlocked };

struct UtilityResult {
  std::uint64_t plays = 0;
  std::uint64_t wins = 0;
  double rate() const;
  double stderr_rate() const;
};

/// Plays uniformly random (i, j) on the canonical resource after locking each
/// qubit with its own key. Players ignore the lock.
UtilityResult locked_resource_utility(ResourceLock lock, std::uint64_t plays, const Execution& exec,
                                      const rbe::KeySpace& key_space = rbe::KeySpace::continuous());

}  // namespace rbelab::entangle
