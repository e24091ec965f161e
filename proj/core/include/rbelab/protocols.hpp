#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbelab/parallel.hpp"
#include "rbelab/rbe.hpp"
#include "rbelab/rng.hpp"
#include "rbelab/weakmeas.hpp"

// Round-level simulations of BB84 (guessing and informed basis), DL04 and the
// RBE-based NOT-encoding QKD protocol over a noiseless channel, with pluggable
// eavesdroppers and the key-bit guessing game.

namespace rbelab::protocols {

enum class Protocol { bb84, bb84_informed, dl04, rbe_qkd };

std::string_view to_string(Protocol p);
/// Accepts the names printed by to_string. Throws std::invalid_argument.
Protocol parse_protocol(std::string_view name);

struct ProtocolConfig {
  Protocol protocol = Protocol::bb84;
  /// Target key length in bits.
  std::uint64_t n = 1;
  /// RBE-QKD only.
  rbe::KeySpace key_space = rbe::KeySpace::discrete(rbe::kDefaultGridSize);
  /// Fraction of usable qubits consumed by the eavesdropping check.
  double check_fraction = 0.5;
  /// DL04 only: Alice learns Bob's basis before her check measurements.
  bool informed_check = false;
  /// Qubits sent in the first leg; 0 selects 4n for BB84 and 2n otherwise.
  std::uint64_t transmissions = 0;

  void validate() const;
  std::uint64_t resolved_transmissions() const;
};

// --- transcripts ----------------------------------------------------------------

/// Everything that happened to one transmitted qubit. Bits not used by the
/// protocol stay at -1. Event times come from one logical clock per run.
struct RoundRecord {
  std::uint64_t index = 0;
  /// Sender's basis bit a (BB84/DL04).
  int prep_basis = -1;
  /// Sender's bit: b for BB84/DL04, b' for RBE-QKD.
  int prep_bit = -1;
  /// RBE-QKD encryption key.
  std::optional<rbe::RbeKey> key;

  /// BB84: Bob's basis guess c.
  int meas_basis = -1;
  /// BB84: Bob's outcome. DL04/RBE-QKD: Bob's final measurement.
  int outcome = -1;
  /// BB84: a == c. DL04/RBE-QKD: survived the check stage.
  bool sifted = false;

  bool checked = false;
  /// DL04: Alice's basis for the check measurement.
  int check_basis = -1;
  int check_outcome = -1;
  /// The check outcome was compared against the sender's bit.
  bool compared = false;
  bool mismatch = false;

  /// DL04: Alice's c. RBE-QKD: Alice's message bit.
  int message_bit = -1;
  int alice_key_bit = -1;
  int bob_key_bit = -1;

  std::uint64_t delivered_at = 0;
  std::uint64_t announced_at = 0;
  std::optional<std::uint64_t> returned_at;
};

struct EveOutput {
  int bit;
  /// Position in the key.
  std::uint64_t index;
  friend bool operator==(const EveOutput&, const EveOutput&) = default;
};

struct EveRecord {
  std::optional<std::uint64_t> target;
  int leg1_outcome = -1;
  int leg2_outcome = -1;
  /// Empty means Eve aborted.
  std::optional<EveOutput> output;
};

struct Transcript {
  Protocol protocol = Protocol::bb84;
  std::uint64_t n = 0;
  std::vector<RoundRecord> rounds;
  std::vector<std::uint64_t> check_indices;
  bool aborted = false;
  std::vector<int> alice_key;
  std::vector<int> bob_key;
  EveRecord eve;
};

// --- eavesdroppers --------------------------------------------------------------

enum class EveKind { none, wm_bb84, wm_dl04, wm_rbe, intercept_resend };

std::string_view to_string(EveKind k);

class EveStrategy {
 public:
  static EveStrategy none() { return EveStrategy(EveKind::none, std::nullopt); }
  /// Measures every first-leg qubit computationally and resends it; guesses
  /// the target key bit from its outcome. BB84 only.
  static EveStrategy intercept_resend() { return EveStrategy(EveKind::intercept_resend, std::nullopt); }

  EveKind kind() const { return kind_; }
  /// The weak meter of the wm_* kinds.
  const weakmeas::WeakMeter* meter() const { return meter_ ? &*meter_ : nullptr; }
  bool compatible_with(Protocol p) const;

 private:
  friend EveStrategy wm_attack_bb84(double epsilon);
  friend EveStrategy wm_attack_dl04(double epsilon);
  friend EveStrategy wm_attack_rbe(double epsilon);
  EveStrategy(EveKind kind, std::optional<weakmeas::WeakMeter> meter)
      : kind_(kind), meter_(std::move(meter)) {}

  EveKind kind_;
  std::optional<weakmeas::WeakMeter> meter_;
};

/// One weak measurement of a uniformly chosen qubit; outputs its outcome.
EveStrategy wm_attack_bb84(double epsilon);
/// Weak measurements of one qubit on both legs; outputs the XOR.
EveStrategy wm_attack_dl04(double epsilon);
/// The two-leg tactic applied to the RBE-QKD protocol.
EveStrategy wm_attack_rbe(double epsilon);

// --- protocol runs ----------------------------------------------------------------

Transcript run_bb84(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng);
Transcript run_bb84_informed(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng);
Transcript run_dl04(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng);
Transcript run_rbe_qkd(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng);
/// Dispatches on config.protocol. Throws std::invalid_argument if the
/// strategy does not fit the protocol.
Transcript run_protocol(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng);

/// DL04's encoding gate ((0, 1), (-1, 0)).
const Unitary& dl04_u();

// --- key-bit guessing game --------------------------------------------------------

struct GameTally {
  std::uint64_t trials = 0;
  std::uint64_t aborts = 0;
  std::uint64_t key_agreement_failures = 0;
  /// Eve delivered (e, i).
  std::uint64_t eve_outputs = 0;
  /// e equals both Alice's and Bob's i-th key bit.
  std::uint64_t eve_correct = 0;
  /// e equals Alice's i-th key bit.
  std::uint64_t eve_guess_correct = 0;
  /// Target qubit reached the key stage (BB84: a == c; DL04/RBE: unchecked).
  std::uint64_t target_usable = 0;
  /// Of those, Alice's and Bob's bits disagree on the target.
  std::uint64_t target_errors = 0;
  /// Target was checked and its outcome compared.
  std::uint64_t target_checks = 0;
  /// Of those, the comparison failed.
  std::uint64_t detected = 0;
  /// First-leg qubits sent, and final key bits produced by non-aborted runs.
  std::uint64_t transmissions = 0;
  std::uint64_t key_bits = 0;

  void merge(const GameTally& o);
  void record(const Transcript& t);
};

struct GameResult : GameTally {
  /// eve_correct / eve_outputs. NaN when undefined.
  double conditional_success() const;
  double success_stderr() const;
  /// eve_guess_correct / eve_outputs.
  double guess_rate() const;
  double guess_stderr() const;
  double advantage() const;
  /// detected / target_checks.
  double detection_rate() const;
  double detection_stderr() const;
  /// target_errors / target_usable.
  double target_error_rate() const;
  double target_error_stderr() const;
  double abort_rate() const;
  /// eve_correct / trials.
  double unconditional_success() const;
  /// key_bits / transmissions.
  double key_rate() const;
};

/// Runs `trials` independent protocol instances; trial t uses
/// Rng::stream(exec.seed, t).
GameResult key_bit_guessing_game(const ProtocolConfig& config, const EveStrategy& eve,
                                 std::uint64_t trials, const Execution& exec);

// --- reference values -------------------------------------------------------------

/// Reference closed forms for Eve success and detection.
struct AnalyticCurves {
  double bb84_success;
  double bb84_detect;
  double dl04_success;
  double dl04_detect;
};

/// Throws std::invalid_argument unless 0 <= epsilon <= 1.
AnalyticCurves analytic_curves(double epsilon);

/// A leaf of the weak-measurement tree on BB84 given a == c: Alice's basis a
/// and bit b, Bob's outcome x and Eve's outcome y. `probability` includes the
/// 1/4 prior on (a, b).
struct Fig8Leaf {
  int a;
  int b;
  int x;
  int y;
  double probability;
};

struct Fig8Tree {
  double epsilon = 0.0;
  std::vector<Fig8Leaf> leaves;

  double total() const;
  /// Mass of b == x == y.
  double eve_correct_mass() const;
  /// Mass of x != b.
  double bob_error_mass() const;
};

/// Evaluates the tree from the closed-form two-qubit states of the a = 0 and
/// a = 1 branches.
Fig8Tree fig8_tree(double epsilon);

/// Exact target-qubit statistics of a weak-measurement attack, by branch
/// enumeration. RBE keys are enumerated on a uniform grid (`key_space`'s own
/// grid in discrete mode, kDefaultGridSize points in continuous mode).
struct AttackStatistics {
  /// P(e equals Alice's key bit | Eve outputs).
  double guess_correct;
  /// P(e equals both key bits | Eve outputs).
  double game_success;
  /// P(Alice's and Bob's key bits differ on the target | it reaches the key stage).
  double bob_error;
  /// P(check mismatch | target checked and compared).
  double detection;
};

AttackStatistics exact_attack_statistics(Protocol protocol, double epsilon,
                                         const rbe::KeySpace& key_space =
                                             rbe::KeySpace::discrete(rbe::kDefaultGridSize));

// --- transcript serialization ------------------------------------------------------

/// One JSON object per line: a header, one record per round, then a summary.
void write_transcript(std::ostream& out, const Transcript& t);
/// Inverse of write_transcript. Throws std::runtime_error on malformed input.
Transcript read_transcript(std::istream& in);

}  // namespace rbelab::protocols
