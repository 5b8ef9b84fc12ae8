#include "entropic/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "entropic/errors.hpp"

#ifndef ENTROPIC_BUILD_ID
#define ENTROPIC_BUILD_ID "unknown"
#endif

namespace entropic {

std::string build_id() { return ENTROPIC_BUILD_ID; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError("'" + text + "' is not a number");
  return v;
}

MetricsLog::MetricsLog(std::vector<std::string> columns) : columns_(std::move(columns)) {
  for (const auto& c : columns_)
    if (c.empty() || c == "step" || c.find_first_of(",\n\"") != std::string::npos)
      throw ValidationError("invalid metric column name '" + c + "'");
}

void MetricsLog::add(long step, std::vector<double> values) {
  if (aborted()) throw ValidationError("metrics log is closed after its abort marker");
  if (values.size() != columns_.size())
    throw ValidationError("metric record has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(columns_.size()));
  if (!records_.empty() && step <= records_.back().step)
    throw ValidationError("metric steps must be strictly increasing (got " + std::to_string(step) + " after " +
                          std::to_string(records_.back().step) + ")");
  records_.push_back({step, std::move(values)});
}

void MetricsLog::abort(long step, std::string reason) {
  if (aborted()) throw ValidationError("metrics log already aborted");
  abort_step_ = step;
  abort_reason_ = std::move(reason);
}

std::size_t MetricsLog::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw ValidationError("metrics log has no column '" + name + "'");
}

std::vector<double> MetricsLog::column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.values[idx]);
  return out;
}

void MetricsLog::write_csv(std::ostream& out) const {
  out << "step";
  for (const auto& c : columns_) out << ',' << c;
  out << '\n';
  for (const auto& r : records_) {
    out << r.step;
    for (double v : r.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void MetricsLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  write_csv(out);
}

nlohmann::json MetricsLog::meta_json() const {
  nlohmann::json j{{"seed", metadata.seed},
                   {"config_hash", metadata.config_hash},
                   {"build_id", metadata.build_id},
                   {"columns", columns_},
                   {"aborted", aborted()}};
  if (aborted()) {
    j["abort_step"] = *abort_step_;
    j["abort_reason"] = abort_reason_;
  }
  return j;
}

void MetricsLog::save(const std::filesystem::path& csv_path) const {
  write_csv(csv_path);
  auto meta = csv_path;
  meta.replace_extension(".meta.json");
  std::ofstream out(meta);
  if (!out) throw ValidationError("cannot open " + meta.string() + " for writing");
  out << meta_json().dump(2) << '\n';
}

MetricsLog MetricsLog::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ValidationError("metrics CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.front() != "step") throw ValidationError("metrics CSV must start with a 'step' column");
  MetricsLog log(std::vector<std::string>(header.begin() + 1, header.end()));
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw ValidationError("metrics CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(header.size()));
    std::vector<double> values;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      try {
        values.push_back(parse_double(cells[i]));
      } catch (const ValidationError&) {
        throw ValidationError("metrics CSV row " + std::to_string(row) + " column '" + header[i] +
                              "' is not a number: '" + cells[i] + "'");
      }
    }
    const double step = parse_double(cells[0]);
    log.add(static_cast<long>(step), std::move(values));
  }
  return log;
}

MetricsLog MetricsLog::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open metrics CSV " + path.string());
  return read_csv(in);
}

}  // namespace entropic
