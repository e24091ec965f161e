#include <cmath>
#include <limits>
#include <stdexcept>

#include "rbelab/protocols.hpp"

namespace rbelab::protocols {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(num) / static_cast<double>(den);
}

double binomial_stderr(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = ratio(num, den);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(den));
}

}  // namespace

void GameTally::merge(const GameTally& o) {
  trials += o.trials;
  aborts += o.aborts;
  key_agreement_failures += o.key_agreement_failures;
  eve_outputs += o.eve_outputs;
  eve_correct += o.eve_correct;
  eve_guess_correct += o.eve_guess_correct;
  target_usable += o.target_usable;
  target_errors += o.target_errors;
  target_checks += o.target_checks;
  detected += o.detected;
  transmissions += o.transmissions;
  key_bits += o.key_bits;
}

void GameTally::record(const Transcript& t) {
  ++trials;
  transmissions += t.rounds.size();
  key_bits += t.alice_key.size();
  if (t.aborted) {
    ++aborts;
  } else if (t.alice_key != t.bob_key) {
    ++key_agreement_failures;
  }

  if (t.eve.output) {
    ++eve_outputs;
    const auto [bit, index] = *t.eve.output;
    const int alice = t.alice_key.at(index);
    const int bob = t.bob_key.at(index);
    if (bit == alice) {
      ++eve_guess_correct;
      if (bit == bob) ++eve_correct;
    }
  }

  if (t.eve.target) {
    const auto& rec = t.rounds.at(*t.eve.target);
    if (rec.alice_key_bit >= 0 && rec.bob_key_bit >= 0) {
      ++target_usable;
      if (rec.alice_key_bit != rec.bob_key_bit) ++target_errors;
    }
    if (rec.checked && rec.compared) {
      ++target_checks;
      if (rec.mismatch) ++detected;
    }
  }
}

double GameResult::conditional_success() const { return ratio(eve_correct, eve_outputs); }
double GameResult::success_stderr() const { return binomial_stderr(eve_correct, eve_outputs); }
double GameResult::guess_rate() const { return ratio(eve_guess_correct, eve_outputs); }
double GameResult::guess_stderr() const { return binomial_stderr(eve_guess_correct, eve_outputs); }
double GameResult::advantage() const { return std::abs(conditional_success() - 0.5); }
double GameResult::detection_rate() const { return ratio(detected, target_checks); }
double GameResult::detection_stderr() const { return binomial_stderr(detected, target_checks); }
double GameResult::target_error_rate() const { return ratio(target_errors, target_usable); }
double GameResult::target_error_stderr() const { return binomial_stderr(target_errors, target_usable); }
double GameResult::abort_rate() const { return ratio(aborts, trials); }
double GameResult::unconditional_success() const { return ratio(eve_correct, trials); }
double GameResult::key_rate() const { return ratio(key_bits, transmissions); }

GameResult key_bit_guessing_game(const ProtocolConfig& config, const EveStrategy& eve,
                                 std::uint64_t trials, const Execution& exec) {
  if (trials == 0) throw std::invalid_argument("the game needs at least one trial");
  config.validate();
  if (!eve.compatible_with(config.protocol)) {
    throw std::invalid_argument("eavesdropper " + std::string(to_string(eve.kind())) +
                                " does not apply to " + std::string(to_string(config.protocol)));
  }
  const GameTally tally =
      run_trials<GameTally>(trials, exec.workers, [&](std::uint64_t t, GameTally& acc) {
        Rng rng = Rng::stream(exec.seed, t);
        acc.record(run_protocol(config, eve, rng));
      });
  GameResult result;
  static_cast<GameTally&>(result) = tally;
  return result;
}

}  // namespace rbelab::protocols
