#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rbelab::cli {

/// One emitted result. Unset metrics are emitted as empty CSV fields and JSON
/// nulls.
struct ResultRecord {
  std::string command;
  /// Echo of the parameters that produced the record, in a fixed order.
  std::vector<std::pair<std::string, std::string>> spec;
  std::uint64_t seed = 0;
  /// 0 for exact computations.
  std::uint64_t trials = 0;

  std::optional<double> epsilon;
  std::optional<double> success;
  std::optional<double> success_analytic;
  std::optional<double> success_exact;
  std::optional<double> success_stderr;
  std::optional<double> advantage;
  std::optional<double> detection;
  std::optional<double> detection_analytic;
  std::optional<double> detection_stderr;
  std::optional<double> key_rate;
  std::optional<double> fidelity;
  std::optional<double> win_rate;
  std::optional<double> win_rate_stderr;
  /// Further named metrics, in emission order.
  std::vector<std::pair<std::string, double>> extra;

  std::optional<double> wall_clock_seconds;
  std::string version;
};

enum class Format { csv, json };

Format parse_format(std::string_view name);

/// Locale-independent, 17 significant digits. NaN and
/// infinities map to the empty string.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

inline constexpr std::string_view kCsvHeader =
    "epsilon,trials,success,success_analytic,detection,detection_analytic,stderr,seed";

void emit(const std::vector<ResultRecord>& records, Format format, std::ostream& out);
void emit_csv(const std::vector<ResultRecord>& records, std::ostream& out);
void emit_json(const std::vector<ResultRecord>& records, std::ostream& out);

/// Reads the CSV columns back. Throws std::runtime_error on malformed input.
std::vector<ResultRecord> parse_csv(std::istream& in);
/// Reads the JSON form back. Throws std::runtime_error on malformed input.
std::vector<ResultRecord> parse_json(std::istream& in);

}  // namespace rbelab::cli
