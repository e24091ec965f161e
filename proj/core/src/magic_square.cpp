#include <array>
#include <stdexcept>

#include "rbelab/entangle.hpp"

namespace rbelab::entangle {

namespace {

using Table = std::array<std::array<Eigen::MatrixXcd, 3>, 3>;

Eigen::MatrixXcd two(const Unitary& a, const Unitary& b, double sign = 1.0) {
  return sign * a.kron(b).matrix();
}

// Rows multiply to +I and columns to -I.
const Table& alice_table() {
  static const Table t = [] {
    const Unitary& i = gates::identity1();
    const Unitary& x = gates::x();
    const Unitary& y = gates::y();
    const Unitary& z = gates::z();
    return Table{{{two(x, i), two(i, x), two(x, x)},
                  {two(i, z), two(z, i), two(z, z)},
                  {two(x, z, -1.0), two(z, x, -1.0), two(y, y)}}};
  }();
  return t;
}

// The resource is a pair of singlets, (I x Y) phi+ up to phase on each, so
// Bob conjugates Alice's table by Y x Y.
const Table& bob_table() {
  static const Table t = [] {
    const Eigen::MatrixXcd yy = gates::y().kron(gates::y()).matrix();
    Table out;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) out[r][c] = yy * alice_table()[r][c] * yy;
    }
    return out;
  }();
  return t;
}

void check_cell(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw std::out_of_range("magic square cells are numbered 1..3");
}

std::size_t at(int k) { return static_cast<std::size_t>(k - 1); }

}  // namespace

FourQubitResource FourQubitResource::canonical() {
  std::vector<Complex> amps(16, 0.0);
  amps[0b0011] = 0.5;
  amps[0b0110] = -0.5;
  amps[0b1001] = -0.5;
  amps[0b1100] = 0.5;
  return FourQubitResource{StateVector::from_amplitudes(std::move(amps))};
}

Eigen::MatrixXcd alice_observable(int i, int j) {
  check_cell(i, j);
  return alice_table()[at(i)][at(j)];
}

Eigen::MatrixXcd bob_observable(int i, int j) {
  check_cell(i, j);
  return bob_table()[at(i)][at(j)];
}

MagicSquareInstance magic_square_play(const FourQubitResource& resource, int i, int j, Rng& rng) {
  check_cell(i, j);
  if (resource.state.num_qubits() != 4) throw std::invalid_argument("the resource must have 4 qubits");
  constexpr std::array<std::size_t, 2> alice_qubits{0, 1};
  constexpr std::array<std::size_t, 2> bob_qubits{2, 3};

  MagicSquareInstance out{i, j, {}, {}, false};
  StateVector s = resource.state;
  for (int k = 1; k <= 3; ++k) {
    auto m = measure_observable(s, alice_table()[at(i)][at(k)], alice_qubits, rng);
    out.alice_row[at(k)] = m.outcome;
    s = std::move(m.post_state);
  }
  for (int k = 1; k <= 3; ++k) {
    auto m = measure_observable(s, bob_table()[at(k)][at(j)], bob_qubits, rng);
    out.bob_col[at(k)] = m.outcome;
    s = std::move(m.post_state);
  }
  out.win = out.alice_row[at(j)] == out.bob_col[at(i)];
  return out;
}

ClassicalBound magic_square_classical_bound() {
  // Each player answers every input with one fixed 3-bit filling of the right parity.
  constexpr std::array<unsigned, 4> even{0b000, 0b011, 0b101, 0b110};
  constexpr std::array<unsigned, 4> odd{0b001, 0b010, 0b100, 0b111};
  auto bit = [](unsigned filling, int k) { return (filling >> (2 - at(k))) & 1u; };

  ClassicalBound result{0, 0, 0, 0.0, false};
  for (unsigned as = 0; as < 64; ++as) {
    for (unsigned bs = 0; bs < 64; ++bs) {
      ++result.strategy_pairs;
      std::uint64_t wins = 0;
      for (int i = 1; i <= 3; ++i) {
        const unsigned row = even[(as >> (2 * at(i))) & 3u];
        for (int j = 1; j <= 3; ++j) {
          const unsigned col = odd[(bs >> (2 * at(j))) & 3u];
          ++result.inputs;
          if (bit(row, j) == bit(col, i)) ++wins;
        }
      }
      if (wins > result.best_wins) result.best_wins = wins;
      if (wins == 9) result.perfect_strategy_found = true;
    }
  }
  result.max_probability = static_cast<double>(result.best_wins) / 9.0;
  return result;
}

}  // namespace rbelab::entangle
