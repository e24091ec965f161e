#include "rbelab_cli/record.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace rbelab::cli {

namespace {

using nlohmann::ordered_json;

std::optional<double> parse_number(const std::string& field) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::runtime_error("bad number '" + field + "'");
  return v;
}

std::uint64_t parse_count(const std::string& field) {
  std::uint64_t v = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw std::runtime_error("bad integer '" + field + "'");
  }
  return v;
}

ordered_json number_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::optional<double> number_from(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void emit_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << format_optional(r.epsilon) << ',' << r.trials << ',' << format_optional(r.success) << ','
        << format_optional(r.success_analytic) << ',' << format_optional(r.detection) << ','
        << format_optional(r.detection_analytic) << ',' << format_optional(r.success_stderr) << ','
        << r.seed << '\n';
  }
  if (!out) throw std::runtime_error("write failed");
}

void emit_json(const std::vector<ResultRecord>& records, std::ostream& out) {
  ordered_json all = ordered_json::array();
  for (const auto& r : records) {
    ordered_json spec = ordered_json::object();
    for (const auto& [k, v] : r.spec) spec[k] = v;
    ordered_json extra = ordered_json::object();
    for (const auto& [k, v] : r.extra) extra[k] = number_json(v);
    ordered_json j;
    j["command"] = r.command;
    j["spec"] = spec;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["epsilon"] = number_json(r.epsilon);
    j["success"] = number_json(r.success);
    j["success_analytic"] = number_json(r.success_analytic);
    j["success_exact"] = number_json(r.success_exact);
    j["stderr"] = number_json(r.success_stderr);
    j["advantage"] = number_json(r.advantage);
    j["detection"] = number_json(r.detection);
    j["detection_analytic"] = number_json(r.detection_analytic);
    j["detection_stderr"] = number_json(r.detection_stderr);
    j["key_rate"] = number_json(r.key_rate);
    j["fidelity"] = number_json(r.fidelity);
    j["win_rate"] = number_json(r.win_rate);
    j["win_rate_stderr"] = number_json(r.win_rate_stderr);
    j["extra"] = extra;
    if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
    j["version"] = r.version;
    all.push_back(std::move(j));
  }
  out << all.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed");
}

void emit(const std::vector<ResultRecord>& records, Format format, std::ostream& out) {
  if (format == Format::csv) {
    emit_csv(records, out);
  } else {
    emit_json(records, out);
  }
}

std::vector<ResultRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("missing or unexpected CSV header");
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 8) throw std::runtime_error("CSV row has " + std::to_string(fields.size()) + " fields");
    ResultRecord r;
    r.epsilon = parse_number(fields[0]);
    r.trials = parse_count(fields[1]);
    r.success = parse_number(fields[2]);
    r.success_analytic = parse_number(fields[3]);
    r.detection = parse_number(fields[4]);
    r.detection_analytic = parse_number(fields[5]);
    r.success_stderr = parse_number(fields[6]);
    r.seed = parse_count(fields[7]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> parse_json(std::istream& in) {
  try {
    const ordered_json all = ordered_json::parse(in);
    if (!all.is_array()) throw std::runtime_error("expected a JSON array of records");
    std::vector<ResultRecord> out;
    for (const auto& j : all) {
      ResultRecord r;
      r.command = j.at("command").get<std::string>();
      for (const auto& [k, v] : j.at("spec").items()) r.spec.emplace_back(k, v.get<std::string>());
      r.seed = j.at("seed").get<std::uint64_t>();
      r.trials = j.at("trials").get<std::uint64_t>();
      r.epsilon = number_from(j, "epsilon");
      r.success = number_from(j, "success");
      r.success_analytic = number_from(j, "success_analytic");
      r.success_exact = number_from(j, "success_exact");
      r.success_stderr = number_from(j, "stderr");
      r.advantage = number_from(j, "advantage");
      r.detection = number_from(j, "detection");
      r.detection_analytic = number_from(j, "detection_analytic");
      r.detection_stderr = number_from(j, "detection_stderr");
      r.key_rate = number_from(j, "key_rate");
      r.fidelity = number_from(j, "fidelity");
      r.win_rate = number_from(j, "win_rate");
      r.win_rate_stderr = number_from(j, "win_rate_stderr");
      for (const auto& [k, v] : j.at("extra").items()) {
        r.extra.emplace_back(k, v.is_null() ? std::nan("") : v.get<double>());
      }
      r.wall_clock_seconds = number_from(j, "wall_clock_seconds");
      r.version = j.at("version").get<std::string>();
      out.push_back(std::move(r));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed result JSON: ") + e.what());
  }
}

}  // namespace rbelab::cli
