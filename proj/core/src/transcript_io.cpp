#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rbelab/protocols.hpp"

namespace rbelab::protocols {

namespace {

using nlohmann::json;

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

json round_to_json(const RoundRecord& r) {
  json key = nullptr;
  if (r.key) key = {{"theta", r.key->theta()}, {"sign", r.key->sign() == rbe::PhaseSign::plus ? "+" : "-"}};
  return {{"type", "round"},
          {"index", r.index},
          {"prep_basis", r.prep_basis},
          {"prep_bit", r.prep_bit},
          {"key", key},
          {"meas_basis", r.meas_basis},
          {"outcome", r.outcome},
          {"sifted", r.sifted},
          {"checked", r.checked},
          {"check_basis", r.check_basis},
          {"check_outcome", r.check_outcome},
          {"compared", r.compared},
          {"mismatch", r.mismatch},
          {"message_bit", r.message_bit},
          {"alice_key_bit", r.alice_key_bit},
          {"bob_key_bit", r.bob_key_bit},
          {"delivered_at", r.delivered_at},
          {"announced_at", r.announced_at},
          {"returned_at", optional_json(r.returned_at)}};
}

RoundRecord round_from_json(const json& j) {
  RoundRecord r;
  r.index = j.at("index").get<std::uint64_t>();
  r.prep_basis = j.at("prep_basis").get<int>();
  r.prep_bit = j.at("prep_bit").get<int>();
  if (const auto& k = j.at("key"); !k.is_null()) {
    const auto sign = k.at("sign").get<std::string>();
    if (sign != "+" && sign != "-") throw std::runtime_error("bad key sign '" + sign + "'");
    r.key = rbe::RbeKey(k.at("theta").get<double>(), sign == "+" ? rbe::PhaseSign::plus : rbe::PhaseSign::minus);
  }
  r.meas_basis = j.at("meas_basis").get<int>();
  r.outcome = j.at("outcome").get<int>();
  r.sifted = j.at("sifted").get<bool>();
  r.checked = j.at("checked").get<bool>();
  r.check_basis = j.at("check_basis").get<int>();
  r.check_outcome = j.at("check_outcome").get<int>();
  r.compared = j.at("compared").get<bool>();
  r.mismatch = j.at("mismatch").get<bool>();
  r.message_bit = j.at("message_bit").get<int>();
  r.alice_key_bit = j.at("alice_key_bit").get<int>();
  r.bob_key_bit = j.at("bob_key_bit").get<int>();
  r.delivered_at = j.at("delivered_at").get<std::uint64_t>();
  r.announced_at = j.at("announced_at").get<std::uint64_t>();
  r.returned_at = optional_from<std::uint64_t>(j.at("returned_at"));
  return r;
}

json parse_line(std::istream& in, const char* expected_type) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(std::string("transcript ended before the ") + expected_type + " record");
  }
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::runtime_error("transcript line is not a JSON object");
  if (j.value("type", "") != expected_type) {
    throw std::runtime_error(std::string("expected a ") + expected_type + " record");
  }
  return j;
}

}  // namespace

void write_transcript(std::ostream& out, const Transcript& t) {
  out << json{{"type", "header"},
              {"protocol", std::string(to_string(t.protocol))},
              {"n", t.n},
              {"rounds", t.rounds.size()}}
             .dump()
      << '\n';
  for (const auto& r : t.rounds) out << round_to_json(r).dump() << '\n';

  json output = nullptr;
  if (t.eve.output) output = {{"bit", t.eve.output->bit}, {"index", t.eve.output->index}};
  out << json{{"type", "summary"},
              {"aborted", t.aborted},
              {"check_indices", t.check_indices},
              {"alice_key", t.alice_key},
              {"bob_key", t.bob_key},
              {"eve",
               {{"target", optional_json(t.eve.target)},
                {"leg1_outcome", t.eve.leg1_outcome},
                {"leg2_outcome", t.eve.leg2_outcome},
                {"output", output}}}}
             .dump()
      << '\n';
}

Transcript read_transcript(std::istream& in) {
  try {
    Transcript t;
    const json header = parse_line(in, "header");
    t.protocol = parse_protocol(header.at("protocol").get<std::string>());
    t.n = header.at("n").get<std::uint64_t>();
    const auto count = header.at("rounds").get<std::uint64_t>();
    t.rounds.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) t.rounds.push_back(round_from_json(parse_line(in, "round")));

    const json summary = parse_line(in, "summary");
    t.aborted = summary.at("aborted").get<bool>();
    t.check_indices = summary.at("check_indices").get<std::vector<std::uint64_t>>();
    t.alice_key = summary.at("alice_key").get<std::vector<int>>();
    t.bob_key = summary.at("bob_key").get<std::vector<int>>();
    const auto& eve = summary.at("eve");
    t.eve.target = optional_from<std::uint64_t>(eve.at("target"));
    t.eve.leg1_outcome = eve.at("leg1_outcome").get<int>();
    t.eve.leg2_outcome = eve.at("leg2_outcome").get<int>();
    if (const auto& o = eve.at("output"); !o.is_null()) {
      t.eve.output = EveOutput{o.at("bit").get<int>(), o.at("index").get<std::uint64_t>()};
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed transcript: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("malformed transcript: ") + e.what());
  }
}

}  // namespace rbelab::protocols
