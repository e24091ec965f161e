#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <rbelab/entangle.hpp>
#include <rbelab/parallel.hpp>
#include <rbelab/protocols.hpp>
#include <rbelab/rbe.hpp>

#include "rbelab_cli/record.hpp"

namespace rbelab::cli {

enum class Attack { none, wm, intercept };

Attack parse_attack(std::string_view name);
std::string_view to_string(Attack a);

struct QkdSpec {
  protocols::Protocol protocol = protocols::Protocol::bb84;
  Attack attack = Attack::none;
  double epsilon = 0.0;
  std::uint64_t trials = 1;
  std::uint64_t n = 1;
  rbe::KeySpace key_space = rbe::KeySpace::discrete(rbe::kDefaultGridSize);
  bool informed_check = false;

  protocols::ProtocolConfig config() const;
  /// Throws std::invalid_argument for combinations that do not apply.
  protocols::EveStrategy strategy() const;
};

/// Runs the key-bit guessing game. `success` is Eve's game success (her bit
/// equals both key bits); the guess rate and target error rate go to `extra`.
ResultRecord run_qkd(const QkdSpec& spec, const Execution& exec);

struct SweepSpec {
  QkdSpec base;
  double eps_from = 0.0;
  double eps_to = 1.0;
  std::uint64_t steps = 10;

  std::vector<double> grid() const;
};

/// One run_qkd row per grid point, all with the same master seed.
std::vector<ResultRecord> run_sweep(const SweepSpec& spec, const Execution& exec);

enum class EntangleExperiment { theft, sharing, magic_square, utility, ensemble };

EntangleExperiment parse_entangle_experiment(std::string_view name);
std::string_view to_string(EntangleExperiment e);

struct EntangleSpec {
  EntangleExperiment experiment = EntangleExperiment::theft;
  entangle::LockScheme scheme = entangle::LockScheme::qotp;
  rbe::KeySpace key_space = rbe::KeySpace::continuous();
  entangle::Interception interception = entangle::Interception::none;
  entangle::ResourceLock lock = entangle::ResourceLock::none;
  std::uint64_t trials = 1;
};

std::vector<ResultRecord> run_entangle(const EntangleSpec& spec, const Execution& exec);

struct TreeSpec {
  double epsilon = 0.5;
  /// Monte Carlo games on top of the exact tree; 0 skips them.
  std::uint64_t trials = 0;
};

/// Exact leaf masses of the weak-measurement tree on BB84, plus an optional
/// informed-basis Monte Carlo estimate.
std::vector<ResultRecord> run_tree(const TreeSpec& spec, const Execution& exec);

struct SelftestCheck {
  std::string name;
  bool passed;
  double observed;
  double tolerance;
};

/// Exact identities: correctness, the closed-form guessing probability, the
/// key-averaged density gap and the homomorphic phase identities.
std::vector<SelftestCheck> run_selftest();

rbe::KeySpace parse_key_space(std::string_view text);
entangle::LockScheme parse_lock_scheme(std::string_view name);
entangle::Interception parse_interception(std::string_view name);
entangle::ResourceLock parse_resource_lock(std::string_view name);

}  // namespace rbelab::cli
