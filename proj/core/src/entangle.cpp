#include "rbelab/entangle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rbelab::entangle {

namespace {

Eigen::MatrixXcd on_qubit(const Unitary& g, std::size_t qubit) {
  return qubit == 0 ? g.kron(gates::identity1()).matrix() : gates::identity1().kron(g).matrix();
}

std::uint64_t grid_of(const rbe::KeySpace& space) {
  return space.mode() == rbe::KeySpace::Mode::discrete ? space.size() : rbe::kDefaultGridSize;
}

// Key-averaged RBE channel on one qubit of a two-qubit density.
Eigen::MatrixXcd average_over_keys(const Eigen::MatrixXcd& rho, std::size_t qubit,
                                   const std::vector<rbe::RbeKey>& keys) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const auto& k : keys) {
    const Eigen::MatrixXcd g = on_qubit(rbe::encryption_gate(k), qubit);
    acc.noalias() += g * rho * g.adjoint();
  }
  return acc / static_cast<double>(keys.size());
}

Eigen::MatrixXcd density_matrix(const StateVector& s) { return density_of(s).matrix(); }

rbe::RbeKey grid_guess(std::uint64_t grid, Rng& rng) {
  const double theta = rbe::grid_angle(1 + rng.below(grid), grid);
  return rbe::RbeKey(theta, rng.bit() ? rbe::PhaseSign::minus : rbe::PhaseSign::plus);
}

std::vector<rbe::RbeKey> grid_keys(std::uint64_t grid) { return rbe::enumerate_keys(grid); }

double binomial_stderr(std::uint64_t k, std::uint64_t n) {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = static_cast<double>(k) / static_cast<double>(n);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

struct Count {
  std::uint64_t total = 0;
  std::uint64_t hits = 0;
  void merge(const Count& o) {
    total += o.total;
    hits += o.hits;
  }
};

// Locks the qubits flagged in `locked` and, for rbe_unlocked, removes the lock
// again before play.
StateVector lock_resource(StateVector s, ResourceLock lock, const std::array<bool, 4>& locked,
                          const rbe::KeySpace& key_space, Rng& rng) {
  if (lock == ResourceLock::none) return s;
  for (std::size_t q = 0; q < 4; ++q) {
    if (!locked[q]) continue;
    if (lock == ResourceLock::qotp_unknown_keys) {
      s = apply(s, qotp_gate(QotpKey::random(rng)), {q});
    } else {
      const Unitary k = rbe::encryption_gate(rbe::gen(key_space, rng));
      s = apply(s, k, {q});
      if (lock == ResourceLock::rbe_unlocked) s = apply(s, k.adjoint(), {q});
    }
  }
  return s;
}

UtilityResult play_locked(ResourceLock lock, const std::array<bool, 4>& locked, std::uint64_t plays,
                          const Execution& exec, const rbe::KeySpace& key_space) {
  if (plays == 0) throw std::invalid_argument("need at least one play");
  const FourQubitResource base = FourQubitResource::canonical();
  const Count c = run_trials<Count>(plays, exec.workers, [&](std::uint64_t t, Count& acc) {
    Rng rng = Rng::stream(exec.seed, t);
    const int i = 1 + static_cast<int>(rng.below(3));
    const int j = 1 + static_cast<int>(rng.below(3));
    const FourQubitResource r{lock_resource(base.state, lock, locked, key_space, rng)};
    ++acc.total;
    if (magic_square_play(r, i, j, rng).win) ++acc.hits;
  });
  return UtilityResult{c.total, c.hits};
}

}  // namespace

const StateVector& phi_plus() {
  static const StateVector s =
      StateVector::from_amplitudes({std::numbers::sqrt2 / 2.0, 0.0, 0.0, std::numbers::sqrt2 / 2.0});
  return s;
}

QotpKey QotpKey::random(Rng& rng) {
  QotpKey k;
  k.x = rng.bit();
  k.z = rng.bit();
  return k;
}

Unitary qotp_gate(QotpKey key) {
  const Unitary& xs = key.x ? gates::x() : gates::identity1();
  const Unitary& zs = key.z ? gates::z() : gates::identity1();
  return xs * zs;
}

EprPair qotp_lock(const EprPair& pair, QotpKey alice, QotpKey bob) {
  return EprPair{apply(apply(pair.state, qotp_gate(alice), {0}), qotp_gate(bob), {1})};
}

EprPair qotp_unlock(const EprPair& pair, QotpKey alice, QotpKey bob) {
  return EprPair{apply(apply(pair.state, qotp_gate(alice).adjoint(), {0}), qotp_gate(bob).adjoint(), {1})};
}

EprPair rbe_lock(const EprPair& pair, const rbe::RbeKey& alice, const rbe::RbeKey& bob) {
  return EprPair{apply(apply(pair.state, rbe::encryption_gate(alice), {0}), rbe::encryption_gate(bob), {1})};
}

EprPair rbe_unlock(const EprPair& pair, const rbe::RbeKey& alice, const rbe::RbeKey& bob) {
  return EprPair{apply(apply(pair.state, rbe::encryption_gate(alice).adjoint(), {0}),
                       rbe::encryption_gate(bob).adjoint(), {1})};
}

DensityMatrix qotp_ensemble(const EprPair& pair) {
  std::vector<DensityMatrix> locked;
  for (int bits = 0; bits < 16; ++bits) {
    const QotpKey a{(bits >> 3) & 1, (bits >> 2) & 1};
    const QotpKey b{(bits >> 1) & 1, bits & 1};
    locked.push_back(density_of(qotp_lock(pair, a, b).state));
  }
  return average_densities(locked);
}

DensityMatrix rbe_ensemble(const EprPair& pair, const rbe::KeySpace& key_space) {
  const auto keys = grid_keys(grid_of(key_space));
  const Eigen::MatrixXcd rho = average_over_keys(
      average_over_keys(density_matrix(pair.state), 0, keys), 1, keys);
  return DensityMatrix::from_matrix(rho);
}

// --- theft --------------------------------------------------------------------------

void TheftConfig::validate() const {
  if (!(fidelity_threshold > 0.0 && fidelity_threshold <= 1.0)) {
    throw std::invalid_argument("fidelity threshold must lie in (0, 1]");
  }
  if (scheme == LockScheme::rbe && guess_grid == 0) throw std::invalid_argument("guess grid must be positive");
}

double TheftResult::rate() const {
  return trials == 0 ? std::numeric_limits<double>::quiet_NaN()
                     : static_cast<double>(successes) / static_cast<double>(trials);
}
double TheftResult::stderr_rate() const { return binomial_stderr(successes, trials); }

std::optional<double> theft_recovery_oracle(const TheftConfig& config) {
  config.validate();
  if (config.scheme == LockScheme::qotp) {
    std::uint64_t hits = 0;
    const EprPair fresh = EprPair::fresh();
    for (int lock = 0; lock < 16; ++lock) {
      const QotpKey la{(lock >> 3) & 1, (lock >> 2) & 1};
      const QotpKey lb{(lock >> 1) & 1, lock & 1};
      const EprPair locked = qotp_lock(fresh, la, lb);
      for (int guess = 0; guess < 16; ++guess) {
        const QotpKey ga{(guess >> 3) & 1, (guess >> 2) & 1};
        const QotpKey gb{(guess >> 1) & 1, guess & 1};
        if (fidelity(phi_plus(), qotp_unlock(locked, ga, gb).state) >= config.fidelity_threshold) ++hits;
      }
    }
    return static_cast<double>(hits) / 256.0;
  }

  if (config.key_space.mode() == rbe::KeySpace::Mode::continuous) return std::nullopt;
  constexpr std::uint64_t kBudget = std::uint64_t{1} << 22;
  const auto keys = grid_keys(config.key_space.size());
  const auto guesses = grid_keys(config.guess_grid);
  const std::uint64_t per_side = keys.size() * guesses.size();
  if (per_side > kBudget / per_side) return std::nullopt;

  // For one half, A = K_guess^dagger K_key; the recovered fidelity of a pair of
  // halves (A, B) is |tr(A B^T)|^2 / 4.
  std::vector<Eigen::Matrix2cd> residual;
  residual.reserve(per_side);
  for (const auto& k : keys) {
    const Eigen::Matrix2cd kk = rbe::encryption_gate(k).matrix();
    for (const auto& g : guesses) {
      const Eigen::Matrix2cd gg = rbe::encryption_gate(g).matrix();
      residual.push_back(gg.adjoint() * kk);
    }
  }
  std::uint64_t hits = 0;
  for (const auto& a : residual) {
    for (const auto& b : residual) {
      if (std::norm((a * b.transpose()).trace()) / 4.0 >= config.fidelity_threshold) ++hits;
    }
  }
  return static_cast<double>(hits) / (static_cast<double>(per_side) * static_cast<double>(per_side));
}

TheftResult theft_recovery_experiment(const TheftConfig& config, std::uint64_t trials,
                                      const Execution& exec) {
  config.validate();
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  const EprPair fresh = EprPair::fresh();
  const Count c = run_trials<Count>(trials, exec.workers, [&](std::uint64_t t, Count& acc) {
    Rng rng = Rng::stream(exec.seed, t);
    EprPair recovered{fresh.state};
    if (config.scheme == LockScheme::qotp) {
      const QotpKey la = QotpKey::random(rng);
      const QotpKey lb = QotpKey::random(rng);
      const QotpKey ga = QotpKey::random(rng);
      const QotpKey gb = QotpKey::random(rng);
      recovered = qotp_unlock(qotp_lock(fresh, la, lb), ga, gb);
    } else {
      const rbe::RbeKey la = rbe::gen(config.key_space, rng);
      const rbe::RbeKey lb = rbe::gen(config.key_space, rng);
      const rbe::RbeKey ga = grid_guess(config.guess_grid, rng);
      const rbe::RbeKey gb = grid_guess(config.guess_grid, rng);
      recovered = rbe_unlock(rbe_lock(fresh, la, lb), ga, gb);
    }
    ++acc.total;
    if (fidelity(phi_plus(), recovered.state) >= config.fidelity_threshold) ++acc.hits;
  });
  TheftResult r;
  r.trials = c.total;
  r.successes = c.hits;
  r.oracle = theft_recovery_oracle(config);
  r.quoted = config.scheme == LockScheme::qotp ? 1.0 / 16.0 : 0.0;
  return r;
}

// --- sharing ------------------------------------------------------------------------

SharingReport secure_epr_sharing(Interception mode, const rbe::KeySpace& key_space,
                                 std::uint64_t magic_square_plays, const Execution& exec) {
  Rng rng = Rng::stream(exec.seed, 0);
  const rbe::RbeKey ka = rbe::gen(key_space, rng);
  const rbe::RbeKey kb = rbe::gen(key_space, rng);
  const EprPair locked = rbe_lock(EprPair::fresh(), ka, kb);

  // Alice always unlocks her own half; the transit half only with its key.
  const bool transit_unlocked = mode != Interception::without_key;
  StateVector joint = apply(locked.state, rbe::encryption_gate(ka).adjoint(), {0});
  if (transit_unlocked) joint = apply(joint, rbe::encryption_gate(kb).adjoint(), {1});

  SharingReport report;
  report.holder_fidelity = fidelity(phi_plus(), joint);

  Eigen::MatrixXcd averaged = density_matrix(phi_plus());
  if (!transit_unlocked) averaged = average_over_keys(averaged, 1, grid_keys(grid_of(key_space)));
  const DensityMatrix avg = DensityMatrix::from_matrix(averaged);
  report.mean_holder_fidelity = fidelity(avg, phi_plus());
  const std::size_t transit[1] = {1};
  report.transit_distance_to_mixed =
      trace_distance(partial_trace(avg, transit), DensityMatrix::maximally_mixed(1));
  report.joint_distance_to_mixed = trace_distance(avg, DensityMatrix::maximally_mixed(2));

  if (magic_square_plays > 0) {
    // Two pairs shared this way; the transit halves are qubits 2 and 3.
    const ResourceLock lock = transit_unlocked ? ResourceLock::rbe_unlocked : ResourceLock::rbe_unknown_keys;
    const Execution play_exec{exec.seed + 1, exec.workers};
    report.magic_square_win_rate =
        play_locked(lock, {false, false, true, true}, magic_square_plays, play_exec, key_space).rate();
  }
  return report;
}

// --- utility ------------------------------------------------------------------------

double UtilityResult::rate() const {
  return plays == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(wins) / static_cast<double>(plays);
}
double UtilityResult::stderr_rate() const { return binomial_stderr(wins, plays); }

UtilityResult locked_resource_utility(ResourceLock lock, std::uint64_t plays, const Execution& exec,
                                      const rbe::KeySpace& key_space) {
  return play_locked(lock, {true, true, true, true}, plays, exec, key_space);
}

}  // namespace rbelab::entangle
