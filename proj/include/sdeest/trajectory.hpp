#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace sdeest {

/// Uniformly spaced observations X_0..X_n with X_0 = x0.
struct Trajectory {
  double step = 0.0;
  double x0 = 0.0;
  std::vector<double> values;

  [[nodiscard]] std::size_t transitions() const { return values.empty() ? 0 : values.size() - 1; }
};

/// Writes `index,time,x` rows (time = index * step) with shortest round-trip
/// formatting. `header_comment` lines are emitted first, each prefixed by "# ".
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& header_comment = {});

/// Reads the format written by write_trajectory_csv. Lines starting with '#'
/// are ignored. The step is taken from the time column and must be uniform.
/// Throws ConfigError naming the offending line.
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace sdeest
