#include <cmath>
#include <stdexcept>

#include "rbelab/protocols.hpp"

namespace rbelab::protocols {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

StateVector prepare(int basis, int bit) {
  StateVector s = StateVector::basis_state(1, static_cast<std::size_t>(bit));
  return basis ? apply(s, gates::h(), {0}) : s;
}

const OrthonormalBasis& bb84_basis(int basis) {
  static const OrthonormalBasis comp = OrthonormalBasis::computational();
  static const OrthonormalBasis had = OrthonormalBasis::hadamard();
  return basis ? had : comp;
}

// P(outcome) for a single-qubit measurement.
double outcome_probability(const StateVector& s, const OrthonormalBasis& basis, int outcome) {
  return fidelity(basis.state(outcome), s);
}

struct Accumulator {
  double guess = 0.0;
  double game = 0.0;
  double bob_error = 0.0;
  double detection = 0.0;
};

AttackStatistics bb84_stats(const weakmeas::WeakMeter& meter) {
  Accumulator acc;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto branches = meter.branches(prepare(a, b), 0);
      for (int y = 0; y < 2; ++y) {
        const auto& br = branches[static_cast<std::size_t>(y)];
        if (!br.post_state) continue;
        const double w = 0.25 * br.probability;
        for (int x = 0; x < 2; ++x) {
          const double p = w * outcome_probability(*br.post_state, bb84_basis(a), x);
          if (y == b) acc.guess += p;
          if (x == b && y == b) acc.game += p;
          if (x != b) acc.bob_error += p;
        }
      }
    }
  }
  return {acc.guess, acc.game, acc.bob_error, acc.bob_error};
}

// One first-leg preparation: the qubit, the basis Alice checks in and Bob
// decodes in, and the sender's bit.
struct Leg {
  double weight;
  StateVector qubit;
  OrthonormalBasis measure_basis;
  int sender_bit;
};

AttackStatistics two_leg_stats(const weakmeas::WeakMeter& meter, const std::vector<Leg>& legs,
                               const Unitary& flip) {
  Accumulator acc;
  for (const auto& leg : legs) {
    const auto first = meter.branches(leg.qubit, 0);
    for (int e1 = 0; e1 < 2; ++e1) {
      const auto& b1 = first[static_cast<std::size_t>(e1)];
      if (!b1.post_state) continue;
      const double w1 = leg.weight * b1.probability;
      acc.detection += w1 * outcome_probability(*b1.post_state, leg.measure_basis, 1 - leg.sender_bit);
      for (int m = 0; m < 2; ++m) {
        const StateVector sent = m ? apply(*b1.post_state, flip, {0}) : *b1.post_state;
        const auto second = meter.branches(sent, 0);
        for (int e2 = 0; e2 < 2; ++e2) {
          const auto& b2 = second[static_cast<std::size_t>(e2)];
          if (!b2.post_state) continue;
          const double w2 = 0.5 * w1 * b2.probability;
          const int guess = e1 ^ e2;
          for (int x = 0; x < 2; ++x) {
            const double p = w2 * outcome_probability(*b2.post_state, leg.measure_basis, x);
            const int bob = x ^ leg.sender_bit;
            if (guess == m) acc.guess += p;
            if (guess == m && bob == m) acc.game += p;
            if (bob != m) acc.bob_error += p;
          }
        }
      }
    }
  }
  return {acc.guess, acc.game, acc.bob_error, acc.detection};
}

}  // namespace

AnalyticCurves analytic_curves(double epsilon) {
  check_epsilon(epsilon);
  const double e = epsilon;
  return AnalyticCurves{0.5 + e / 8.0, e / 4.0,
                        0.5 + (6.0 * e * e - 3.0 * e * e * e) / (16.0 - 8.0 * e), e / 4.0};
}

double Fig8Tree::total() const {
  double s = 0.0;
  for (const auto& l : leaves) s += l.probability;
  return s;
}

double Fig8Tree::eve_correct_mass() const {
  double s = 0.0;
  for (const auto& l : leaves) {
    if (l.b == l.x && l.b == l.y) s += l.probability;
  }
  return s;
}

double Fig8Tree::bob_error_mass() const {
  double s = 0.0;
  for (const auto& l : leaves) {
    if (l.x != l.b) s += l.probability;
  }
  return s;
}

Fig8Tree fig8_tree(double epsilon) {
  check_epsilon(epsilon);
  const double keep = std::sqrt(1.0 - epsilon);
  const Complex kick(0.0, std::sqrt(epsilon));

  Fig8Tree tree;
  tree.epsilon = epsilon;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      // Amplitudes over |x y>: Bob's qubit (after his basis rotation) and Eve's ancilla.
      std::array<Complex, 4> amp{};
      if (a == 0) {
        amp[0] = static_cast<double>(1 - b) * (keep + kick);
        amp[2] = static_cast<double>(b) * keep;
        amp[3] = static_cast<double>(b) * kick;
      } else {
        const double sign = b ? -1.0 : 1.0;
        amp[0] = (keep + sign * keep + kick) / 2.0;
        amp[1] = sign * kick / 2.0;
        amp[2] = (keep + kick - sign * keep) / 2.0;
        amp[3] = -sign * kick / 2.0;
      }
      for (int idx = 0; idx < 4; ++idx) {
        tree.leaves.push_back({a, b, idx >> 1, idx & 1, 0.25 * std::norm(amp[static_cast<std::size_t>(idx)])});
      }
    }
  }
  return tree;
}

AttackStatistics exact_attack_statistics(Protocol protocol, double epsilon,
                                         const rbe::KeySpace& key_space) {
  check_epsilon(epsilon);
  const weakmeas::WeakMeter meter{weakmeas::WeakStrength(epsilon)};
  switch (protocol) {
    case Protocol::bb84:
    case Protocol::bb84_informed: return bb84_stats(meter);
    case Protocol::dl04: {
      std::vector<Leg> legs;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) legs.push_back({0.25, prepare(a, b), bb84_basis(a), b});
      }
      return two_leg_stats(meter, legs, dl04_u());
    }
    case Protocol::rbe_qkd: {
      const std::uint64_t grid = key_space.mode() == rbe::KeySpace::Mode::discrete
                                     ? key_space.size()
                                     : rbe::kDefaultGridSize;
      const auto keys = rbe::enumerate_keys(grid);
      const double w = 0.5 / static_cast<double>(keys.size());
      std::vector<Leg> legs;
      legs.reserve(2 * keys.size());
      for (const auto& k : keys) {
        const auto basis = k.basis();
        for (int b = 0; b < 2; ++b) legs.push_back({w, basis.state(b), basis, b});
      }
      return two_leg_stats(meter, legs, gates::x());
    }
  }
  throw std::invalid_argument("unknown protocol");
}

}  // namespace rbelab::protocols
