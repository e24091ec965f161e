#include "rbelab/rbe.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rbelab::rbe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_bit(int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
}

struct ZeroCounts {
  std::uint64_t enc0 = 0;
  std::uint64_t enc1 = 0;
  void merge(const ZeroCounts& o) {
    enc0 += o.enc0;
    enc1 += o.enc1;
  }
};

double binomial_stderr(double p, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

RbeKey::RbeKey(double theta, PhaseSign sign) : theta_(theta), sign_(sign) {
  if (!std::isfinite(theta) || theta < 0.0 || theta > kTwoPi) {
    throw std::invalid_argument("RBE key angle theta must lie in [0, 2pi]");
  }
}

double RbeKey::phi() const {
  return sign_ == PhaseSign::plus ? std::numbers::pi / 2.0 : -std::numbers::pi / 2.0;
}

KeySpace KeySpace::discrete(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("discrete key space needs N >= 1");
  return KeySpace(Mode::discrete, n);
}

std::string KeySpace::describe() const {
  return mode_ == Mode::continuous ? "continuous" : "discrete:" + std::to_string(n_);
}

RbeKey gen(const KeySpace& space, Rng& rng) {
  double theta;
  if (space.mode() == KeySpace::Mode::continuous) {
    theta = kTwoPi * rng.uniform();
  } else {
    const std::uint64_t n = 1 + rng.below(space.size());
    theta = grid_angle(n, space.size());
  }
  const PhaseSign sign = rng.bit() ? PhaseSign::minus : PhaseSign::plus;
  return RbeKey(theta, sign);
}

Unitary encryption_gate(const RbeKey& key) {
  const auto b = key.basis();
  Eigen::MatrixXcd k(2, 2);
  k << b.psi0()[0], b.psi1()[0], b.psi0()[1], b.psi1()[1];
  return Unitary::from_matrix(std::move(k));
}

Ciphertext enc(int bit, const RbeKey& key) {
  check_bit(bit);
  return Ciphertext{key.basis().state(bit)};
}

StateVector decrypt_unmeasured(const Ciphertext& c, const RbeKey& key) {
  return apply(c.qubit, encryption_gate(key).adjoint(), {0});
}

int dec(const Ciphertext& c, const RbeKey& key, Rng& rng) {
  return measure_in_basis(decrypt_unmeasured(c, key), 0, OrthonormalBasis::computational(), rng)
      .outcome;
}

Ciphertext eval_not(const Ciphertext& c) { return Ciphertext{apply(c.qubit, gates::x(), {0})}; }

const Unitary& d_gate() {
  static const Unitary d = gates::cnot() * gates::h().kron(gates::identity1());
  return d;
}

StateVector eval_d(const Ciphertext& c) {
  return apply(tensor(StateVector(1), c.qubit), d_gate(), {0, 1});
}

StateVector eval_cnot(int control_bit, const Ciphertext& c) {
  check_bit(control_bit);
  return apply(tensor(StateVector::basis_state(1, static_cast<std::size_t>(control_bit)), c.qubit),
               gates::cnot(), {0, 1});
}

StateVector eval_cn_not(std::span<const int> control_bits, const Ciphertext& c) {
  if (control_bits.size() > kMaxControls) {
    throw CapacityError("C^nNOT evaluation supports at most " + std::to_string(kMaxControls) +
                        " controls");
  }
  if (control_bits.empty()) return eval_not(c).qubit;
  std::size_t index = 0;
  for (int b : control_bits) {
    check_bit(b);
    index = (index << 1) | static_cast<std::size_t>(b);
  }
  const std::size_t n = control_bits.size();
  const StateVector state = tensor(StateVector::basis_state(n, index), c.qubit);
  std::vector<std::size_t> targets(n + 1);
  for (std::size_t q = 0; q <= n; ++q) targets[q] = q;
  return apply(state, gates::controlled_not(n), targets);
}

double hadamard_probe(const RbeKey& key) {
  const auto basis = key.basis();
  const StateVector psi0 = basis.state(0);
  return fidelity(psi0, apply(psi0, gates::h(), {0}));
}

// --- no-go --------------------------------------------------------------------

bool NoGoReport::any_violated() const {
  for (const auto& c : constraints) {
    if (!c.satisfied) return true;
  }
  return false;
}

std::vector<NoGoConstraint> NoGoReport::violated() const {
  std::vector<NoGoConstraint> out;
  for (const auto& c : constraints) {
    if (!c.satisfied) out.push_back(c);
  }
  return out;
}

std::string NoGoReport::summary() const {
  std::ostringstream os;
  for (const auto& c : violated()) {
    os << "(theta=" << c.theta << ", phi=" << c.phi << "): P|psi" << c.control_bit << " psi"
       << c.target_bit << "> should be |psi" << c.control_bit << " psi"
       << (c.control_bit ^ c.target_bit) << "> but fidelity is " << c.fidelity << '\n';
  }
  return os.str();
}

NoGoReport cnot_no_go_witness(const Unitary& candidate) {
  if (candidate.dim() != 4) throw std::invalid_argument("candidate must be a 2-qubit unitary");
  NoGoReport report;
  const std::array<std::array<double, 2>, 2> settings{{{0.0, std::numbers::pi}, {std::numbers::pi, 0.0}}};
  for (const auto& [theta, phi] : settings) {
    const auto basis = basis_from_angles(theta, phi);
    for (int cb = 0; cb < 2; ++cb) {
      for (int tb = 0; tb < 2; ++tb) {
        const StateVector in = tensor(basis.state(cb), basis.state(tb));
        const StateVector want = tensor(basis.state(cb), basis.state(cb ^ tb));
        const double f = fidelity(apply(in, candidate, {0, 1}), want);
        report.constraints.push_back({theta, phi, cb, tb, f, f >= 1.0 - kAmplitudeTol});
      }
    }
  }
  return report;
}

// --- security -----------------------------------------------------------------

double lemma1_probability(double theta, double phi, double theta0, double phi0) {
  const double a = std::cos((theta + theta0) / 2.0);
  const double b = std::cos((theta - theta0) / 2.0);
  return 0.5 * (a * a + b * b + std::sin(theta) * std::sin(theta0) * std::cos(phi - phi0));
}

double lemma1_direct(double theta, double phi, double theta0, double phi0) {
  return fidelity(basis_from_angles(theta0, phi0).state(0), basis_from_angles(theta, phi).state(0));
}

double Lemma1Scan::p0_given_enc0() const {
  return static_cast<double>(zeros_given_enc0) / static_cast<double>(trials);
}
double Lemma1Scan::p0_given_enc1() const {
  return static_cast<double>(zeros_given_enc1) / static_cast<double>(trials);
}
double Lemma1Scan::stderr_enc0() const { return binomial_stderr(p0_given_enc0(), trials); }
double Lemma1Scan::stderr_enc1() const { return binomial_stderr(p0_given_enc1(), trials); }

Lemma1Scan lemma1_scan(const OrthonormalBasis& adversary, const KeySpace& space,
                       std::uint64_t trials, const Execution& exec) {
  if (trials == 0) throw std::invalid_argument("lemma1_scan needs at least one trial");
  const auto counts = run_trials<ZeroCounts>(trials, exec.workers, [&](std::uint64_t t, ZeroCounts& acc) {
    Rng rng = Rng::stream(exec.seed, t);
    const RbeKey key = gen(space, rng);
    const auto basis = key.basis();
    if (measure_in_basis(basis.state(0), 0, adversary, rng).outcome == 0) ++acc.enc0;
    if (measure_in_basis(basis.state(1), 0, adversary, rng).outcome == 0) ++acc.enc1;
  });
  return Lemma1Scan{trials, counts.enc0, counts.enc1};
}

double grid_angle(std::uint64_t n, std::uint64_t grid_size) {
  if (n >= grid_size) return kTwoPi;
  return kTwoPi * static_cast<double>(n) / static_cast<double>(grid_size);
}

std::vector<RbeKey> enumerate_keys(std::uint64_t grid_size) {
  if (grid_size == 0) throw std::invalid_argument("grid size must be positive");
  std::vector<RbeKey> keys;
  keys.reserve(2 * grid_size);
  for (std::uint64_t n = 1; n <= grid_size; ++n) {
    const double theta = grid_angle(n, grid_size);
    keys.emplace_back(theta, PhaseSign::plus);
    keys.emplace_back(theta, PhaseSign::minus);
  }
  return keys;
}

double lemma1_exact_average(const OrthonormalBasis& adversary, std::uint64_t grid_size, int bit) {
  check_bit(bit);
  const StateVector target = adversary.state(0);
  double sum = 0.0;
  const auto keys = enumerate_keys(grid_size);
  for (const auto& k : keys) sum += fidelity(target, k.basis().state(bit));
  return sum / static_cast<double>(keys.size());
}

DensityMatrix averaged_ciphertext(const KeySpace& space, int bit, std::uint64_t resolution) {
  check_bit(bit);
  const std::uint64_t points =
      space.mode() == KeySpace::Mode::discrete ? space.size() : resolution;
  if (space.mode() == KeySpace::Mode::continuous && resolution < 3) {
    throw std::invalid_argument("continuous averaging needs a grid of at least 3 points");
  }
  const auto keys = enumerate_keys(points);
  std::vector<WeightedState> ensemble;
  ensemble.reserve(keys.size());
  const double w = 1.0 / static_cast<double>(keys.size());
  for (const auto& k : keys) ensemble.push_back({w, k.basis().state(bit)});
  return average_density(ensemble);
}

double density_gap(const KeySpace& space, std::uint64_t resolution) {
  return trace_distance(averaged_ciphertext(space, 0, resolution),
                        averaged_ciphertext(space, 1, resolution));
}

}  // namespace rbelab::rbe
