#pragma once

#include <array>

#include "rbelab/qcore.hpp"
#include "rbelab/rng.hpp"

// Weak measurement: couple the measured qubit (control) to a fresh |0>
// ancilla (target) through W_eps = sqrt(eps) i CNOT + sqrt(1-eps) I, then
// measure the ancilla in the computational basis and drop it.

namespace rbelab::weakmeas {

class WeakStrength {
 public:
  /// Throws std::invalid_argument unless 0 <= epsilon <= 1.
  explicit WeakStrength(double epsilon);
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

Unitary w_epsilon(WeakStrength s);

struct WeakOutcome {
  int ancilla_bit;
  /// Residual state with the ancilla removed.
  StateVector post_state;
  double probability_one;
};

/// A weak meter with its W_eps matrix built once.
class WeakMeter {
 public:
  explicit WeakMeter(WeakStrength s);

  WeakStrength strength() const { return strength_; }
  const Unitary& gate() const { return gate_; }

  /// Exact ancilla-outcome branches; index k holds outcome k.
  std::array<Branch, 2> branches(const StateVector& state, std::size_t target) const;
  WeakOutcome measure(const StateVector& state, std::size_t target, Rng& rng) const;

 private:
  WeakStrength strength_;
  Unitary gate_;
};

std::array<Branch, 2> weak_branches(const StateVector& state, std::size_t target, WeakStrength s);
WeakOutcome weak_measure(const StateVector& state, std::size_t target, WeakStrength s, Rng& rng);

}  // namespace rbelab::weakmeas
