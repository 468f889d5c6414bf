#include "sdeest/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "sdeest/error.hpp"
#include "sdeest/trajectory.hpp"

namespace sdeest {

namespace csv {

std::string real(double v) { return fmt::format("{}", v); }

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_real(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace csv

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& header_comment) {
  for (const auto& line : header_comment) out << "# " << line << '\n';
  out << "index,time,x\n";
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    out << i << ',' << csv::real(static_cast<double>(i) * traj.step) << ',' << csv::real(traj.values[i]) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::vector<double> times;
  Trajectory traj;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != "index,time,x") {
        throw ConfigError(fmt::format("trajectory csv line {}: expected header 'index,time,x', got '{}'", line_no, line));
      }
      seen_header = true;
      continue;
    }
    const auto fields = csv::split(line);
    double index = 0.0, time = 0.0, x = 0.0;
    if (fields.size() != 3 || !csv::parse_real(fields[0], index) || !csv::parse_real(fields[1], time) ||
        !csv::parse_real(fields[2], x) || !std::isfinite(time) || !std::isfinite(x)) {
      throw ConfigError(fmt::format("trajectory csv line {}: malformed row '{}'", line_no, line));
    }
    if (index != static_cast<double>(traj.values.size())) {
      throw ConfigError(fmt::format("trajectory csv line {}: index {} out of sequence", line_no, fields[0]));
    }
    times.push_back(time);
    traj.values.push_back(x);
  }
  if (!seen_header) throw ConfigError("trajectory csv: missing header");
  if (traj.values.size() < 2) throw ConfigError("trajectory csv: fewer than 2 observations");
  traj.x0 = traj.values.front();
  traj.step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(traj.step > 0.0)) throw ConfigError("trajectory csv: time column must increase");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times.front() + static_cast<double>(i) * traj.step;
    if (std::abs(times[i] - expected) > 1e-9 * (1.0 + std::abs(expected))) {
      throw ConfigError(fmt::format("trajectory csv: non-uniform time at index {}", i));
    }
  }
  return traj;
}

}  // namespace sdeest
