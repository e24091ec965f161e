#include "rbelab_cli/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <rbelab/qcore.hpp>

namespace rbelab::cli {

namespace {

using protocols::Protocol;

std::optional<double> finite(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::string text(double v) { return format_number(v); }
std::string text(std::uint64_t v) { return std::to_string(v); }

StateVector bit_state(int bit) { return StateVector::basis_state(1, static_cast<std::size_t>(bit)); }

/// Reference closed forms where they exist. RBE-QKD uses the resilience
/// target of one half.
std::pair<std::optional<double>, std::optional<double>> analytic_for(Protocol p, Attack attack,
                                                                       double eps) {
  if (attack != Attack::wm) return {std::nullopt, std::nullopt};
  const auto curves = protocols::analytic_curves(eps);
  switch (p) {
    case Protocol::bb84:
    case Protocol::bb84_informed:
      return {curves.bb84_success, curves.bb84_detect};
    case Protocol::dl04:
      return {curves.dl04_success, curves.dl04_detect};
    case Protocol::rbe_qkd:
      return {0.5, std::nullopt};
  }
  return {std::nullopt, std::nullopt};
}

std::uint64_t parse_grid_size(std::string_view digits) {
  std::uint64_t n = 0;
  const auto* end = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(digits.data(), end, n);
  if (digits.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument("bad key grid size '" + std::string(digits) + "'");
  }
  return n;
}

}  // namespace

Attack parse_attack(std::string_view name) {
  if (name == "none") return Attack::none;
  if (name == "wm") return Attack::wm;
  if (name == "intercept") return Attack::intercept;
  throw std::invalid_argument("unknown attack '" + std::string(name) + "'");
}

std::string_view to_string(Attack a) {
  switch (a) {
    case Attack::none:
      return "none";
    case Attack::wm:
      return "wm";
    case Attack::intercept:
      return "intercept";
  }
  return "none";
}

rbe::KeySpace parse_key_space(std::string_view text) {
  if (text == "continuous") return rbe::KeySpace::continuous();
  constexpr std::string_view prefix = "discrete:";
  if (text.substr(0, prefix.size()) == prefix) {
    return rbe::KeySpace::discrete(parse_grid_size(text.substr(prefix.size())));
  }
  throw std::invalid_argument("key space must be 'continuous' or 'discrete:N'");
}

entangle::LockScheme parse_lock_scheme(std::string_view name) {
  if (name == "qotp") return entangle::LockScheme::qotp;
  if (name == "rbe") return entangle::LockScheme::rbe;
  throw std::invalid_argument("unknown lock scheme '" + std::string(name) + "'");
}

entangle::Interception parse_interception(std::string_view name) {
  if (name == "none") return entangle::Interception::none;
  if (name == "without-key") return entangle::Interception::without_key;
  if (name == "leaked-key") return entangle::Interception::leaked_key;
  throw std::invalid_argument("unknown interception '" + std::string(name) + "'");
}

entangle::ResourceLock parse_resource_lock(std::string_view name) {
  if (name == "none") return entangle::ResourceLock::none;
  if (name == "qotp") return entangle::ResourceLock::qotp_unknown_keys;
  if (name == "rbe") return entangle::ResourceLock::rbe_unknown_keys;
  if (name == "rbe-unlocked") return entangle::ResourceLock::rbe_unlocked;
  throw std::invalid_argument("unknown resource lock '" + std::string(name) + "'");
}

EntangleExperiment parse_entangle_experiment(std::string_view name) {
  if (name == "theft") return EntangleExperiment::theft;
  if (name == "sharing") return EntangleExperiment::sharing;
  if (name == "magic-square") return EntangleExperiment::magic_square;
  if (name == "utility") return EntangleExperiment::utility;
  if (name == "ensemble") return EntangleExperiment::ensemble;
  throw std::invalid_argument("unknown entanglement experiment '" + std::string(name) + "'");
}

std::string_view to_string(EntangleExperiment e) {
  switch (e) {
    case EntangleExperiment::theft:
      return "theft";
    case EntangleExperiment::sharing:
      return "sharing";
    case EntangleExperiment::magic_square:
      return "magic-square";
    case EntangleExperiment::utility:
      return "utility";
    case EntangleExperiment::ensemble:
      return "ensemble";
  }
  return "theft";
}

// --- qkd -------------------------------------------------------------------------

protocols::ProtocolConfig QkdSpec::config() const {
  protocols::ProtocolConfig c;
  c.protocol = protocol;
  c.n = n;
  c.key_space = key_space;
  c.informed_check = informed_check;
  return c;
}

protocols::EveStrategy QkdSpec::strategy() const {
  switch (attack) {
    case Attack::none:
      return protocols::EveStrategy::none();
    case Attack::intercept:
      if (protocol != Protocol::bb84 && protocol != Protocol::bb84_informed) {
        throw std::invalid_argument("intercept-resend applies to the BB84 variants only");
      }
      return protocols::EveStrategy::intercept_resend();
    case Attack::wm:
      switch (protocol) {
        case Protocol::bb84:
        case Protocol::bb84_informed:
          return protocols::wm_attack_bb84(epsilon);
        case Protocol::dl04:
          return protocols::wm_attack_dl04(epsilon);
        case Protocol::rbe_qkd:
          return protocols::wm_attack_rbe(epsilon);
      }
  }
  throw std::invalid_argument("unsupported attack");
}

ResultRecord run_qkd(const QkdSpec& spec, const Execution& exec) {
  if (spec.trials == 0) throw std::invalid_argument("trials must be at least 1");
  const auto eve = spec.strategy();
  const auto game = protocols::key_bit_guessing_game(spec.config(), eve, spec.trials, exec);

  ResultRecord r;
  r.command = "qkd";
  r.spec = {{"protocol", std::string(protocols::to_string(spec.protocol))},
            {"attack", std::string(to_string(spec.attack))},
            {"epsilon", text(spec.epsilon)},
            {"trials", text(spec.trials)},
            {"n", text(spec.n)},
            {"key_space", spec.key_space.describe()},
            {"informed_check", spec.informed_check ? "true" : "false"}};
  r.seed = exec.seed;
  r.trials = spec.trials;
  if (spec.attack == Attack::wm) r.epsilon = spec.epsilon;

  r.success = finite(game.conditional_success());
  r.success_stderr = finite(game.success_stderr());
  r.advantage = finite(game.advantage());
  r.detection = finite(game.detection_rate());
  r.detection_stderr = finite(game.detection_stderr());
  r.key_rate = finite(game.key_rate());
  const auto [success_analytic, detection_analytic] = analytic_for(spec.protocol, spec.attack, spec.epsilon);
  r.success_analytic = success_analytic;
  r.detection_analytic = detection_analytic;
  if (spec.attack == Attack::wm) {
    r.success_exact = protocols::exact_attack_statistics(spec.protocol, spec.epsilon, spec.key_space).game_success;
  }

  r.extra = {{"eve_outputs", static_cast<double>(game.eve_outputs)},
             {"guess_rate", game.guess_rate()},
             {"guess_stderr", game.guess_stderr()},
             {"target_error_rate", game.target_error_rate()},
             {"target_error_stderr", game.target_error_stderr()},
             {"target_checks", static_cast<double>(game.target_checks)},
             {"abort_rate", game.abort_rate()},
             {"key_agreement_failures", static_cast<double>(game.key_agreement_failures)}};
  return r;
}

// --- sweep -------------------------------------------------------------------------

std::vector<double> SweepSpec::grid() const {
  if (steps == 0) throw std::invalid_argument("steps must be at least 1");
  if (!(eps_from >= 0.0 && eps_from <= 1.0 && eps_to >= 0.0 && eps_to <= 1.0)) {
    throw std::invalid_argument("epsilon bounds must lie in [0, 1]");
  }
  if (steps == 1) {
    if (eps_from != eps_to) throw std::invalid_argument("a single step needs eps-from equal to eps-to");
    return {eps_from};
  }
  std::vector<double> out;
  out.reserve(steps);
  const double span = eps_to - eps_from;
  for (std::uint64_t k = 0; k < steps; ++k) {
    out.push_back(eps_from + span * static_cast<double>(k) / static_cast<double>(steps - 1));
  }
  out.back() = eps_to;
  return out;
}

std::vector<ResultRecord> run_sweep(const SweepSpec& spec, const Execution& exec) {
  if (spec.base.attack != Attack::wm) throw std::invalid_argument("sweep needs the wm attack");
  std::vector<ResultRecord> out;
  for (const double eps : spec.grid()) {
    QkdSpec point = spec.base;
    point.epsilon = eps;
    ResultRecord r = run_qkd(point, exec);
    r.command = "sweep";
    out.push_back(std::move(r));
  }
  return out;
}

// --- entangle ------------------------------------------------------------------------

std::vector<ResultRecord> run_entangle(const EntangleSpec& spec, const Execution& exec) {
  if (spec.trials == 0) throw std::invalid_argument("trials must be at least 1");
  ResultRecord r;
  r.command = "entangle";
  r.spec = {{"experiment", std::string(to_string(spec.experiment))}, {"trials", text(spec.trials)}};
  r.seed = exec.seed;
  r.trials = spec.trials;

  switch (spec.experiment) {
    case EntangleExperiment::theft: {
      entangle::TheftConfig config;
      config.scheme = spec.scheme;
      config.key_space = spec.key_space;
      const auto result = entangle::theft_recovery_experiment(config, spec.trials, exec);
      r.spec.emplace_back("scheme", spec.scheme == entangle::LockScheme::qotp ? "qotp" : "rbe");
      r.spec.emplace_back("key_space", spec.key_space.describe());
      r.success = result.rate();
      r.success_stderr = result.stderr_rate();
      r.success_analytic = result.oracle;
      r.extra = {{"quoted_rate", result.quoted}, {"successes", static_cast<double>(result.successes)}};
      break;
    }
    case EntangleExperiment::sharing: {
      const auto report = entangle::secure_epr_sharing(spec.interception, spec.key_space, spec.trials, exec);
      static constexpr std::array<std::string_view, 3> names{"none", "without-key", "leaked-key"};
      r.spec.emplace_back("interception", std::string(names[static_cast<std::size_t>(spec.interception)]));
      r.spec.emplace_back("key_space", spec.key_space.describe());
      r.fidelity = report.holder_fidelity;
      if (report.magic_square_win_rate) {
        const double p = *report.magic_square_win_rate;
        r.win_rate = p;
        r.win_rate_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(spec.trials));
      }
      r.extra = {{"mean_holder_fidelity", report.mean_holder_fidelity},
                 {"transit_distance_to_mixed", report.transit_distance_to_mixed},
                 {"joint_distance_to_mixed", report.joint_distance_to_mixed}};
      break;
    }
    case EntangleExperiment::magic_square:
    case EntangleExperiment::utility: {
      const auto lock =
          spec.experiment == EntangleExperiment::magic_square ? entangle::ResourceLock::none : spec.lock;
      static constexpr std::array<std::string_view, 4> names{"none", "qotp", "rbe", "rbe-unlocked"};
      r.spec.emplace_back("lock", std::string(names[static_cast<std::size_t>(lock)]));
      const auto result = entangle::locked_resource_utility(lock, spec.trials, exec, spec.key_space);
      r.win_rate = result.rate();
      r.win_rate_stderr = result.stderr_rate();
      const auto bound = entangle::magic_square_classical_bound();
      r.extra = {{"wins", static_cast<double>(result.wins)}, {"classical_max", bound.max_probability}};
      break;
    }
    case EntangleExperiment::ensemble: {
      r.trials = 0;
      const auto pair = entangle::EprPair::fresh();
      const auto mixed = DensityMatrix::maximally_mixed(2);
      const auto ensemble = spec.scheme == entangle::LockScheme::qotp
                                ? entangle::qotp_ensemble(pair)
                                : entangle::rbe_ensemble(pair, spec.key_space);
      r.spec.emplace_back("scheme", spec.scheme == entangle::LockScheme::qotp ? "qotp" : "rbe");
      r.spec.emplace_back("key_space", spec.key_space.describe());
      r.fidelity = fidelity(ensemble, entangle::phi_plus());
      r.extra = {{"distance_to_mixed", trace_distance(ensemble, mixed)}};
      break;
    }
  }
  return {r};
}

// --- tree ----------------------------------------------------------------------------

std::vector<ResultRecord> run_tree(const TreeSpec& spec, const Execution& exec) {
  const auto tree = protocols::fig8_tree(spec.epsilon);
  const auto curves = protocols::analytic_curves(spec.epsilon);

  ResultRecord r;
  r.command = "tree";
  r.spec = {{"epsilon", text(spec.epsilon)}, {"trials", text(spec.trials)}};
  r.seed = exec.seed;
  r.trials = spec.trials;
  r.epsilon = spec.epsilon;
  r.success_exact = tree.eve_correct_mass();
  r.success_analytic = curves.bb84_success;
  r.detection_analytic = curves.bb84_detect;
  r.extra.emplace_back("total_mass", tree.total());
  r.extra.emplace_back("bob_error_mass", tree.bob_error_mass());
  for (const auto& leaf : tree.leaves) {
    r.extra.emplace_back("leaf_a" + std::to_string(leaf.a) + "_b" + std::to_string(leaf.b) + "_x" +
                             std::to_string(leaf.x) + "_y" + std::to_string(leaf.y),
                         leaf.probability);
  }

  if (spec.trials > 0) {
    protocols::ProtocolConfig config;
    config.protocol = Protocol::bb84_informed;
    const auto game =
        protocols::key_bit_guessing_game(config, protocols::wm_attack_bb84(spec.epsilon), spec.trials, exec);
    r.success = finite(game.conditional_success());
    r.success_stderr = finite(game.success_stderr());
    r.detection = finite(game.target_error_rate());
    r.detection_stderr = finite(game.target_error_stderr());
    r.extra.emplace_back("eve_outputs", static_cast<double>(game.eve_outputs));
  }
  return {r};
}

// --- selftest ------------------------------------------------------------------------

std::vector<SelftestCheck> run_selftest() {
  constexpr double tol = 1e-12;
  constexpr int grid = 100;
  std::vector<rbe::RbeKey> keys;
  for (int k = 0; k <= grid; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / grid;
    keys.emplace_back(theta, rbe::PhaseSign::plus);
    keys.emplace_back(theta, rbe::PhaseSign::minus);
  }

  auto worst_phase_error = [](const StateVector& a, const StateVector& b) {
    return 1.0 - fidelity(a, b);
  };

  std::vector<SelftestCheck> out;
  auto add = [&](std::string name, double observed, double tolerance) {
    out.push_back({std::move(name), observed <= tolerance, observed, tolerance});
  };

  double correctness = 0.0;
  double not_identity = 0.0;
  double d_identity = 0.0;
  double cnot_identity = 0.0;
  double cn_identity = 0.0;
  double probe = 0.0;
  for (const auto& key : keys) {
    const auto basis = key.basis();
    const Complex i_sign = key.sign() == rbe::PhaseSign::plus ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
    for (int b = 0; b <= 1; ++b) {
      const auto c = rbe::enc(b, key);
      const auto plain = rbe::decrypt_unmeasured(c, key);
      correctness = std::max(correctness, std::abs(std::abs(plain[static_cast<std::size_t>(b)]) - 1.0));

      not_identity = std::max(not_identity, worst_phase_error(rbe::eval_not(c).qubit, basis.state(1 - b)));

      // D|0 psi0> = (|0 psi0> + s i |1 psi1>) / sqrt2 and D|0 psi1> = (|0 psi1> - s i |1 psi0>) / sqrt2.
      const auto first = tensor(bit_state(0), basis.state(b));
      const auto second = tensor(bit_state(1), basis.state(1 - b));
      const Complex weight = (b == 0 ? i_sign : -i_sign);
      std::vector<Complex> expected(4);
      for (std::size_t k = 0; k < 4; ++k) expected[k] = (first[k] + weight * second[k]) / std::sqrt(2.0);
      d_identity = std::max(
          d_identity, worst_phase_error(rbe::eval_d(c), StateVector::from_amplitudes(std::move(expected))));

      for (int control = 0; control <= 1; ++control) {
        const auto want = tensor(bit_state(control), basis.state(b ^ control));
        cnot_identity = std::max(cnot_identity, worst_phase_error(rbe::eval_cnot(control, c), want));
      }

      for (std::size_t n = 1; n <= rbe::kMaxControls; ++n) {
        for (unsigned pattern = 0; pattern < (1u << n); ++pattern) {
          std::vector<int> controls(n);
          StateVector want = bit_state(static_cast<int>((pattern >> (n - 1)) & 1u));
          for (std::size_t q = 0; q < n; ++q) {
            controls[q] = static_cast<int>((pattern >> (n - 1 - q)) & 1u);
            if (q > 0) want = tensor(want, bit_state(controls[q]));
          }
          const int flip = pattern == (1u << n) - 1 ? 1 : 0;
          want = tensor(want, basis.state(b ^ flip));
          cn_identity = std::max(cn_identity, worst_phase_error(rbe::eval_cn_not(controls, c), want));
        }
      }
    }
    const double cos_theta = std::cos(key.theta());
    probe = std::max(probe, std::abs(rbe::hadamard_probe(key) - cos_theta * cos_theta / 2.0));
  }
  add("rbe-correctness", correctness, tol);
  add("homomorphic-not", not_identity, tol);
  add("homomorphic-d", d_identity, tol);
  add("homomorphic-cnot", cnot_identity, tol);
  add("homomorphic-cn-not", cn_identity, tol);
  add("hadamard-probe", probe, tol);

  double closed_form = 0.0;
  constexpr int angle_steps = 24;
  for (int a = 0; a <= angle_steps; ++a) {
    for (int b = 0; b <= angle_steps; ++b) {
      const double theta = 2.0 * std::numbers::pi * a / angle_steps;
      const double theta0 = 2.0 * std::numbers::pi * b / angle_steps;
      for (const double phi : {std::numbers::pi / 2, -std::numbers::pi / 2}) {
        for (const double phi0 : {0.0, 0.7, std::numbers::pi / 2, 2.9}) {
          closed_form = std::max(closed_form, std::abs(rbe::lemma1_probability(theta, phi, theta0, phi0) -
                                                       rbe::lemma1_direct(theta, phi, theta0, phi0)));
        }
      }
    }
  }
  add("guessing-closed-form", closed_form, tol);

  double average = 0.0;
  for (const double theta0 : {0.3, 1.1, 2.5}) {
    for (const double phi0 : {0.0, 1.3}) {
      const auto adversary = basis_from_angles(theta0, phi0);
      for (int b = 0; b <= 1; ++b) {
        average = std::max(average, std::abs(rbe::lemma1_exact_average(adversary, 64, b) - 0.5));
      }
    }
  }
  add("guessing-key-average", average, tol);

  double d_balance = 0.0;
  for (const auto& key : keys) {
    for (int b = 0; b <= 1; ++b) {
      const auto branches = branches_in_basis(rbe::eval_d(rbe::enc(b, key)), 1, key.basis());
      d_balance = std::max(d_balance, std::abs(branches[0].probability - 0.5));
    }
  }
  add("d-gate-balance", d_balance, tol);

  double gap = 0.0;
  for (const std::uint64_t n : {3u, 64u, 4096u}) gap = std::max(gap, rbe::density_gap(rbe::KeySpace::discrete(n)));
  add("ciphertext-indistinguishability", gap, tol);
  const double control = rbe::density_gap(rbe::KeySpace::discrete(1));
  out.push_back({"single-key-distinguishability", std::abs(control - 1.0) <= tol, std::abs(control - 1.0), tol});
  return out;
}

}  // namespace rbelab::cli
