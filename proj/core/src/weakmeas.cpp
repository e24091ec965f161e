#include "rbelab/weakmeas.hpp"

#include <cmath>
#include <stdexcept>

namespace rbelab::weakmeas {

WeakStrength::WeakStrength(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("weak measurement strength must lie in [0, 1]");
  }
}

Unitary w_epsilon(WeakStrength s) {
  const double eps = s.epsilon();
  const Eigen::MatrixXcd m = Complex(0.0, std::sqrt(eps)) * gates::cnot().matrix() +
                             std::sqrt(1.0 - eps) * Eigen::MatrixXcd::Identity(4, 4);
  return Unitary::from_matrix(m);
}

WeakMeter::WeakMeter(WeakStrength s) : strength_(s), gate_(w_epsilon(s)) {}

std::array<Branch, 2> WeakMeter::branches(const StateVector& state, std::size_t target) const {
  if (target >= state.num_qubits()) throw std::out_of_range("weak measurement target out of range");
  if (state.num_qubits() + 1 > kMaxQubits) throw CapacityError("no room for the ancilla qubit");
  const std::size_t ancilla = state.num_qubits();
  const StateVector coupled = apply(tensor(state, StateVector(1)), gate_, {target, ancilla});
  return branches_discarding(coupled, ancilla);
}

WeakOutcome WeakMeter::measure(const StateVector& state, std::size_t target, Rng& rng) const {
  auto b = branches(state, target);
  const double p1 = b[1].post_state ? (b[0].post_state ? b[1].probability : 1.0) : 0.0;
  const int bit = rng.uniform() < p1 ? 1 : 0;
  return WeakOutcome{bit, std::move(*b[static_cast<std::size_t>(bit)].post_state), p1};
}

std::array<Branch, 2> weak_branches(const StateVector& state, std::size_t target, WeakStrength s) {
  return WeakMeter(s).branches(state, target);
}

WeakOutcome weak_measure(const StateVector& state, std::size_t target, WeakStrength s, Rng& rng) {
  return WeakMeter(s).measure(state, target, rng);
}

}  // namespace rbelab::weakmeas
