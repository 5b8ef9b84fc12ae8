#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace entropic {

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string build_id;
};

/// Build identifier baked in at configure time (git describe), or "unknown".
std::string build_id();

/// Ordered metric records keyed by a strictly increasing step.
///
/// Non-finite values are legal sentinels and are written as "nan", "inf" or "-inf".
/// After abort() no further records are accepted.
class MetricsLog {
 public:
  struct Record {
    long step = 0;
    std::vector<double> values;
  };

  /// Metric column names, excluding the leading "step" column.
  explicit MetricsLog(std::vector<std::string> columns);

  void add(long step, std::vector<double> values);
  void abort(long step, std::string reason);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<Record>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  bool aborted() const noexcept { return abort_step_.has_value(); }
  std::optional<long> abort_step() const noexcept { return abort_step_; }
  const std::string& abort_reason() const noexcept { return abort_reason_; }

  /// All values of one column in step order; throws ValidationError for an unknown name.
  std::vector<double> column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;

  RunMetadata metadata;

  /// Header "step,<columns>" then one row per record.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  /// Seed, config hash, build id and the abort marker, if any.
  nlohmann::json meta_json() const;
  /// Writes path and path with extension ".meta.json".
  void save(const std::filesystem::path& csv_path) const;

  /// Parse a CSV written by write_csv. Throws ValidationError naming the bad row or column.
  static MetricsLog read_csv(std::istream& in);
  static MetricsLog read_csv(const std::filesystem::path& path);

 private:
  std::vector<std::string> columns_;
  std::vector<Record> records_;
  std::optional<long> abort_step_;
  std::string abort_reason_;
};

/// Locale-independent shortest round-trip formatting; non-finite values as nan/inf/-inf.
std::string format_double(double v);
/// Inverse of format_double; throws ValidationError on malformed text.
double parse_double(const std::string& text);

}  // namespace entropic
