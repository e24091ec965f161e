#include "rbelab_cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <rbelab/protocols.hpp>

#include "rbelab_cli/experiments.hpp"
#include "rbelab_cli/record.hpp"

#ifndef RBELAB_VERSION
#define RBELAB_VERSION "unknown"
#endif

namespace rbelab::cli {

namespace {

/// Invalid flag combinations that CLI11 cannot express. Reported like every
/// other std::invalid_argument.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string format = "json";
  std::string output;
  bool timing = false;
};

struct QkdOptions {
  std::string protocol = "bb84";
  std::string attack = "none";
  std::optional<double> epsilon;
  std::uint64_t trials = 100000;
  std::uint64_t n = 1;
  std::string key_space = "discrete:4096";
  bool informed_check = false;
  std::string transcript;
};

struct SweepOptions {
  QkdOptions qkd;
  double eps_from = 0.1;
  double eps_to = 1.0;
  std::uint64_t steps = 10;
};

struct EntangleOptions {
  std::string experiment = "theft";
  std::string scheme = "qotp";
  std::string key_space = "continuous";
  std::string interception = "none";
  std::string lock = "none";
  std::uint64_t trials = 10000;
};

struct TreeOptions {
  double epsilon = 0.5;
  std::uint64_t trials = 0;
};

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

std::ofstream open_for_writing(const std::string& path) {
  const auto resolved = resolve_output(path);
  std::ofstream file(resolved, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write to '" + resolved.string() + "'");
  return file;
}

QkdSpec to_spec(const QkdOptions& o) {
  QkdSpec spec;
  spec.protocol = protocols::parse_protocol(o.protocol);
  spec.attack = parse_attack(o.attack);
  spec.trials = o.trials;
  spec.n = o.n;
  spec.key_space = parse_key_space(o.key_space);
  spec.informed_check = o.informed_check;
  if (spec.informed_check && spec.protocol != protocols::Protocol::dl04) {
    throw UsageError("--informed-check applies to dl04 only");
  }
  if (spec.attack == Attack::intercept && spec.protocol != protocols::Protocol::bb84 &&
      spec.protocol != protocols::Protocol::bb84_informed) {
    throw UsageError("--attack intercept applies to bb84 and bb84-informed only");
  }
  return spec;
}

void add_qkd_options(CLI::App& cmd, QkdOptions& o, bool with_epsilon) {
  cmd.add_option("--protocol", o.protocol, "bb84, bb84-informed, dl04 or rbe-qkd")
      ->check(CLI::IsMember({"bb84", "bb84-informed", "dl04", "rbe-qkd"}))
      ->capture_default_str();
  cmd.add_option("--attack", o.attack, "none, wm or intercept")
      ->check(CLI::IsMember({"none", "wm", "intercept"}))
      ->capture_default_str();
  if (with_epsilon) cmd.add_option("--epsilon", o.epsilon, "Weak-measurement strength")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--trials", o.trials, "Independent protocol runs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--n", o.n, "Key length in bits")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--key-space", o.key_space, "RBE keys: continuous or discrete:N")->capture_default_str();
  cmd.add_flag("--informed-check", o.informed_check, "DL04: Alice learns Bob's check basis");
}

std::vector<SelftestCheck> selftest_and_report(std::ostream& out) {
  auto checks = run_selftest();
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " observed=" << c.observed << " tolerance=" << c.tolerance
        << '\n';
  }
  return checks;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-basis encryption and QKD weak-measurement experiments", "rbelab"};
  app.set_version_flag("--version", RBELAB_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Master seed; drawn at random and reported when absent");
  app.add_option("--workers", global.workers, "Worker threads; 0 uses every core")->capture_default_str();
  app.add_option("--format", global.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--output", global.output,
                 std::string("Output file; relative paths resolve against $") + kOutputDirEnv);
  app.add_flag("--timing", global.timing, "Record wall-clock seconds (makes output non-reproducible)");

  auto* selftest = app.add_subcommand("selftest", "Check the exact identities of the encryption scheme");

  QkdOptions qkd;
  auto* qkd_cmd = app.add_subcommand("qkd", "Run the key-bit guessing game for one protocol and attack");
  add_qkd_options(*qkd_cmd, qkd, true);
  qkd_cmd->add_option("--transcript", qkd.transcript, "Write the transcript of trial 0 as JSON lines");

  SweepOptions sweep;
  sweep.qkd.attack = "wm";
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the game over an epsilon grid");
  add_qkd_options(*sweep_cmd, sweep.qkd, false);
  sweep_cmd->add_option("--eps-from", sweep.eps_from, "First epsilon")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sweep_cmd->add_option("--eps-to", sweep.eps_to, "Last epsilon")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sweep_cmd->add_option("--steps", sweep.steps, "Grid points")->check(CLI::PositiveNumber)->capture_default_str();

  EntangleOptions ent;
  auto* ent_cmd = app.add_subcommand("entangle", "Entanglement locking, theft and magic square experiments");
  ent_cmd->add_option("--experiment", ent.experiment, "theft, sharing, magic-square, utility or ensemble")
      ->check(CLI::IsMember({"theft", "sharing", "magic-square", "utility", "ensemble"}))
      ->capture_default_str();
  ent_cmd->add_option("--scheme", ent.scheme, "Lock for theft and ensemble: qotp or rbe")
      ->check(CLI::IsMember({"qotp", "rbe"}))
      ->capture_default_str();
  ent_cmd->add_option("--key-space", ent.key_space, "RBE keys: continuous or discrete:N")->capture_default_str();
  ent_cmd->add_option("--interception", ent.interception, "Sharing: none, without-key or leaked-key")
      ->check(CLI::IsMember({"none", "without-key", "leaked-key"}))
      ->capture_default_str();
  ent_cmd->add_option("--lock", ent.lock, "Utility: none, qotp, rbe or rbe-unlocked")
      ->check(CLI::IsMember({"none", "qotp", "rbe", "rbe-unlocked"}))
      ->capture_default_str();
  ent_cmd->add_option("--trials", ent.trials, "Trials or plays")->check(CLI::PositiveNumber)->capture_default_str();

  TreeOptions tree;
  auto* tree_cmd = app.add_subcommand("tree", "Weak-measurement outcome tree on BB84");
  tree_cmd->add_option("--epsilon", tree.epsilon, "Weak-measurement strength")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tree_cmd->add_option("--trials", tree.trials, "Monte Carlo games; 0 reports the exact tree only")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (selftest->parsed()) {
      const auto checks = selftest_and_report(out);
      const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
      out << (ok ? "selftest passed" : "selftest FAILED") << '\n';
      return ok ? kExitOk : kExitFailure;
    }

    const Format format = parse_format(global.format);
    Execution exec;
    if (!global.seed) {
      std::random_device entropy;
      global.seed = (static_cast<std::uint64_t>(entropy()) << 32) | entropy();
    }
    exec.seed = *global.seed;
    exec.workers = global.workers;

    const auto start = std::chrono::steady_clock::now();
    std::vector<ResultRecord> records;
    if (qkd_cmd->parsed()) {
      QkdSpec spec = to_spec(qkd);
      if (spec.attack == Attack::wm) {
        if (!qkd.epsilon) throw UsageError("--attack wm needs --epsilon");
        spec.epsilon = *qkd.epsilon;
      } else if (qkd.epsilon) {
        throw UsageError("--epsilon applies to --attack wm only");
      }
      records.push_back(run_qkd(spec, exec));
      if (!qkd.transcript.empty()) {
        Rng rng = Rng::stream(exec.seed, 0);
        const auto t = protocols::run_protocol(spec.config(), spec.strategy(), rng);
        auto file = open_for_writing(qkd.transcript);
        protocols::write_transcript(file, t);
        if (!file) throw std::runtime_error("failed writing the transcript");
      }
    } else if (sweep_cmd->parsed()) {
      SweepSpec spec;
      spec.base = to_spec(sweep.qkd);
      if (spec.base.attack != Attack::wm) throw UsageError("sweep runs the wm attack only");
      if (sweep.eps_from > sweep.eps_to) throw UsageError("--eps-from must not exceed --eps-to");
      if (sweep.steps == 1 && sweep.eps_from != sweep.eps_to) {
        throw UsageError("--steps 1 needs --eps-from equal to --eps-to");
      }
      spec.eps_from = sweep.eps_from;
      spec.eps_to = sweep.eps_to;
      spec.steps = sweep.steps;
      records = run_sweep(spec, exec);
    } else if (ent_cmd->parsed()) {
      EntangleSpec spec;
      spec.experiment = parse_entangle_experiment(ent.experiment);
      spec.scheme = parse_lock_scheme(ent.scheme);
      spec.key_space = parse_key_space(ent.key_space);
      spec.interception = parse_interception(ent.interception);
      spec.lock = parse_resource_lock(ent.lock);
      spec.trials = ent.trials;
      records = run_entangle(spec, exec);
    } else if (tree_cmd->parsed()) {
      records = run_tree(TreeSpec{tree.epsilon, tree.trials}, exec);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (auto& r : records) {
      r.version = RBELAB_VERSION;
      if (global.timing) r.wall_clock_seconds = seconds;
    }

    if (global.output.empty()) {
      emit(records, format, out);
    } else {
      auto file = open_for_writing(global.output);
      emit(records, format, file);
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace rbelab::cli
