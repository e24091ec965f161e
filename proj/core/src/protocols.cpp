#include "rbelab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbelab::protocols {

namespace {

StateVector prepare(int basis, int bit) {
  StateVector s = StateVector::basis_state(1, static_cast<std::size_t>(bit));
  return basis ? apply(s, gates::h(), {0}) : s;
}

int measure_bit(const StateVector& s, int basis, Rng& rng) {
  const StateVector rotated = basis ? apply(s, gates::h(), {0}) : s;
  return measure_in_basis(rotated, 0, OrthonormalBasis::computational(), rng).outcome;
}

// k distinct positions of [0, count), in increasing order.
std::vector<std::uint64_t> choose_subset(std::uint64_t count, std::uint64_t k, Rng& rng) {
  std::vector<std::uint64_t> pool(count);
  for (std::uint64_t i = 0; i < count; ++i) pool[i] = i;
  for (std::uint64_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(count - i)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::uint64_t check_count(std::uint64_t usable, double fraction) {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(usable) * fraction));
}

class Clock {
 public:
  std::uint64_t tick() { return now_++; }

 private:
  std::uint64_t now_ = 0;
};

void require(const ProtocolConfig& config, Protocol expected, const EveStrategy& eve) {
  config.validate();
  if (config.protocol != expected) {
    throw std::invalid_argument("configuration is for " + std::string(to_string(config.protocol)) +
                                ", not " + std::string(to_string(expected)));
  }
  if (!eve.compatible_with(expected)) {
    throw std::invalid_argument("eavesdropper " + std::string(to_string(eve.kind())) +
                                " does not apply to " + std::string(to_string(expected)));
  }
}

std::optional<std::uint64_t> pick_target(const EveStrategy& eve, std::uint64_t transmissions, Rng& rng) {
  if (eve.kind() == EveKind::none) return std::nullopt;
  return rng.below(transmissions);
}

// Weak measurement on the target qubit, if this is it.
void tap(const EveStrategy& eve, const std::optional<std::uint64_t>& target, std::uint64_t r,
         StateVector& qubit, int& outcome, Rng& rng) {
  if (!target || *target != r || eve.meter() == nullptr) return;
  auto out = eve.meter()->measure(qubit, 0, rng);
  outcome = out.ancilla_bit;
  qubit = std::move(out.post_state);
}

// Fills keys, the abort flag and Eve's output once every round is settled.
void settle(Transcript& t, int eve_bit) {
  for (const auto& r : t.rounds) {
    if (r.mismatch) t.aborted = true;
  }
  if (t.aborted) {
    t.alice_key.clear();
    t.bob_key.clear();
  } else {
    for (const auto& r : t.rounds) {
      if (r.sifted && !r.checked) {
        t.alice_key.push_back(r.alice_key_bit);
        t.bob_key.push_back(r.bob_key_bit);
      }
    }
  }
  if (!t.eve.target || t.aborted) return;
  const auto& tr = t.rounds[*t.eve.target];
  if (!tr.sifted || tr.checked) return;
  std::uint64_t index = 0;
  for (std::uint64_t r = 0; r < *t.eve.target; ++r) {
    if (t.rounds[r].sifted && !t.rounds[r].checked) ++index;
  }
  t.eve.output = EveOutput{eve_bit, index};
}

Transcript run_bb84_impl(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng,
                         bool informed) {
  const std::uint64_t total = config.resolved_transmissions();
  Transcript t;
  t.protocol = config.protocol;
  t.n = config.n;
  t.rounds.resize(total);
  t.eve.target = pick_target(eve, total, rng);
  Clock clock;

  for (std::uint64_t r = 0; r < total; ++r) {
    auto& rec = t.rounds[r];
    rec.index = r;
    rec.prep_basis = rng.bit();
    rec.prep_bit = rng.bit();
    StateVector qubit = prepare(rec.prep_basis, rec.prep_bit);

    if (eve.kind() == EveKind::intercept_resend) {
      auto m = measure_in_basis(qubit, 0, OrthonormalBasis::computational(), rng);
      if (t.eve.target == r) t.eve.leg1_outcome = m.outcome;
      qubit = std::move(m.post_state);
    } else {
      tap(eve, t.eve.target, r, qubit, t.eve.leg1_outcome, rng);
    }

    rec.delivered_at = clock.tick();
    if (informed) {
      // Bob holds the qubit until Alice reveals a.
      rec.announced_at = clock.tick();
      rec.meas_basis = rec.prep_basis;
    } else {
      rec.meas_basis = rng.bit();
    }
    rec.outcome = measure_bit(qubit, rec.meas_basis, rng);
  }
  if (!informed) {
    for (auto& rec : t.rounds) rec.announced_at = clock.tick();
  }

  std::vector<std::uint64_t> usable;
  for (auto& rec : t.rounds) {
    rec.sifted = rec.prep_basis == rec.meas_basis;
    if (rec.sifted) {
      rec.alice_key_bit = rec.prep_bit;
      rec.bob_key_bit = rec.outcome;
      usable.push_back(rec.index);
    }
  }
  const auto picks = choose_subset(usable.size(), check_count(usable.size(), config.check_fraction), rng);
  for (auto p : picks) {
    auto& rec = t.rounds[usable[p]];
    rec.checked = true;
    rec.compared = true;
    rec.check_outcome = rec.outcome;
    rec.mismatch = rec.outcome != rec.prep_bit;
    t.check_indices.push_back(rec.index);
  }
  settle(t, t.eve.leg1_outcome);
  return t;
}

}  // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::bb84: return "bb84";
    case Protocol::bb84_informed: return "bb84-informed";
    case Protocol::dl04: return "dl04";
    case Protocol::rbe_qkd: return "rbe-qkd";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::bb84, Protocol::bb84_informed, Protocol::dl04, Protocol::rbe_qkd}) {
    if (name == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(EveKind k) {
  switch (k) {
    case EveKind::none: return "none";
    case EveKind::wm_bb84: return "wm-bb84";
    case EveKind::wm_dl04: return "wm-dl04";
    case EveKind::wm_rbe: return "wm-rbe";
    case EveKind::intercept_resend: return "intercept-resend";
  }
  return "?";
}

void ProtocolConfig::validate() const {
  if (n == 0) throw std::invalid_argument("key length n must be at least 1");
  if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
    throw std::invalid_argument("check fraction must lie in (0, 1)");
  }
}

std::uint64_t ProtocolConfig::resolved_transmissions() const {
  if (transmissions != 0) return transmissions;
  return protocol == Protocol::bb84 ? 4 * n : 2 * n;
}

bool EveStrategy::compatible_with(Protocol p) const {
  switch (kind_) {
    case EveKind::none: return true;
    case EveKind::wm_bb84:
    case EveKind::intercept_resend: return p == Protocol::bb84 || p == Protocol::bb84_informed;
    case EveKind::wm_dl04: return p == Protocol::dl04;
    case EveKind::wm_rbe: return p == Protocol::rbe_qkd;
  }
  return false;
}

EveStrategy wm_attack_bb84(double epsilon) {
  return EveStrategy(EveKind::wm_bb84, weakmeas::WeakMeter(weakmeas::WeakStrength(epsilon)));
}
EveStrategy wm_attack_dl04(double epsilon) {
  return EveStrategy(EveKind::wm_dl04, weakmeas::WeakMeter(weakmeas::WeakStrength(epsilon)));
}
EveStrategy wm_attack_rbe(double epsilon) {
  return EveStrategy(EveKind::wm_rbe, weakmeas::WeakMeter(weakmeas::WeakStrength(epsilon)));
}

const Unitary& dl04_u() {
  static const Unitary u = [] {
    Eigen::MatrixXcd m(2, 2);
    m << 0.0, 1.0, -1.0, 0.0;
    return Unitary::from_matrix(std::move(m));
  }();
  return u;
}

Transcript run_bb84(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng) {
  require(config, Protocol::bb84, eve);
  return run_bb84_impl(config, eve, rng, false);
}

Transcript run_bb84_informed(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng) {
  require(config, Protocol::bb84_informed, eve);
  return run_bb84_impl(config, eve, rng, true);
}

Transcript run_dl04(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng) {
  require(config, Protocol::dl04, eve);
  const std::uint64_t total = config.resolved_transmissions();
  Transcript t;
  t.protocol = Protocol::dl04;
  t.n = config.n;
  t.rounds.resize(total);
  t.eve.target = pick_target(eve, total, rng);
  Clock clock;

  std::vector<StateVector> in_flight;
  in_flight.reserve(total);
  for (std::uint64_t r = 0; r < total; ++r) {
    auto& rec = t.rounds[r];
    rec.index = r;
    rec.prep_basis = rng.bit();
    rec.prep_bit = rng.bit();
    StateVector qubit = prepare(rec.prep_basis, rec.prep_bit);
    tap(eve, t.eve.target, r, qubit, t.eve.leg1_outcome, rng);
    rec.delivered_at = clock.tick();
    in_flight.push_back(std::move(qubit));
  }

  // Alice announces which qubits she measures and what she got.
  const std::uint64_t announced = clock.tick();
  for (auto p : choose_subset(total, check_count(total, config.check_fraction), rng)) {
    auto& rec = t.rounds[p];
    rec.checked = true;
    rec.check_basis = config.informed_check ? rec.prep_basis : rng.bit();
    rec.check_outcome = measure_bit(in_flight[p], rec.check_basis, rng);
    rec.compared = rec.check_basis == rec.prep_basis;
    rec.mismatch = rec.compared && rec.check_outcome != rec.prep_bit;
    t.check_indices.push_back(p);
  }
  bool abort = false;
  for (auto& rec : t.rounds) {
    rec.announced_at = announced;
    rec.sifted = !rec.checked;
    abort = abort || rec.mismatch;
  }

  if (!abort) {
    for (auto& rec : t.rounds) {
      if (rec.checked) continue;
      StateVector& qubit = in_flight[rec.index];
      rec.message_bit = rng.bit();
      if (rec.message_bit) qubit = apply(qubit, dl04_u(), {0});
      rec.returned_at = clock.tick();
      tap(eve, t.eve.target, rec.index, qubit, t.eve.leg2_outcome, rng);
      rec.outcome = measure_bit(qubit, rec.prep_basis, rng);
      rec.alice_key_bit = rec.message_bit;
      rec.bob_key_bit = rec.outcome ^ rec.prep_bit;
    }
  }
  settle(t, t.eve.leg1_outcome ^ t.eve.leg2_outcome);
  return t;
}

Transcript run_rbe_qkd(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng) {
  require(config, Protocol::rbe_qkd, eve);
  const std::uint64_t total = config.resolved_transmissions();
  Transcript t;
  t.protocol = Protocol::rbe_qkd;
  t.n = config.n;
  t.rounds.resize(total);
  t.eve.target = pick_target(eve, total, rng);
  Clock clock;

  std::vector<rbe::Ciphertext> in_flight;
  in_flight.reserve(total);
  for (std::uint64_t r = 0; r < total; ++r) {
    auto& rec = t.rounds[r];
    rec.index = r;
    rec.prep_bit = rng.bit();
    rec.key = rbe::gen(config.key_space, rng);
    rbe::Ciphertext c = rbe::enc(rec.prep_bit, *rec.key);
    tap(eve, t.eve.target, r, c.qubit, t.eve.leg1_outcome, rng);
    rec.delivered_at = clock.tick();
    in_flight.push_back(std::move(c));
  }

  // Alice names her positions, Bob reveals their keys, Alice publishes outcomes.
  const std::uint64_t announced = clock.tick();
  for (auto p : choose_subset(total, check_count(total, config.check_fraction), rng)) {
    auto& rec = t.rounds[p];
    rec.checked = true;
    rec.check_outcome = rbe::dec(in_flight[p], *rec.key, rng);
    rec.compared = true;
    rec.mismatch = rec.check_outcome != rec.prep_bit;
    t.check_indices.push_back(p);
  }
  bool abort = false;
  for (auto& rec : t.rounds) {
    rec.announced_at = announced;
    rec.sifted = !rec.checked;
    abort = abort || rec.mismatch;
  }

  if (!abort) {
    for (auto& rec : t.rounds) {
      if (rec.checked) continue;
      rbe::Ciphertext& c = in_flight[rec.index];
      rec.message_bit = rng.bit();
      if (rec.message_bit) c = rbe::eval_not(c);
      rec.returned_at = clock.tick();
      tap(eve, t.eve.target, rec.index, c.qubit, t.eve.leg2_outcome, rng);
      rec.outcome = rbe::dec(c, *rec.key, rng);
      rec.alice_key_bit = rec.message_bit;
      rec.bob_key_bit = rec.outcome ^ rec.prep_bit;
    }
  }
  settle(t, t.eve.leg1_outcome ^ t.eve.leg2_outcome);
  return t;
}

Transcript run_protocol(const ProtocolConfig& config, const EveStrategy& eve, Rng& rng) {
  switch (config.protocol) {
    case Protocol::bb84: return run_bb84(config, eve, rng);
    case Protocol::bb84_informed: return run_bb84_informed(config, eve, rng);
    case Protocol::dl04: return run_dl04(config, eve, rng);
    case Protocol::rbe_qkd: return run_rbe_qkd(config, eve, rng);
  }
  throw std::invalid_argument("unknown protocol");
}

}  // namespace rbelab::protocols
