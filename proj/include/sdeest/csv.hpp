#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sdeest::csv {

/// Shortest decimal string that parses back to the same double; '.' separator.
std::string real(double v);

/// Splits on ',' without quoting support (none of our schemas quote).
std::vector<std::string_view> split(std::string_view line);

/// Full-string parse of a double; returns false on trailing garbage or empty input.
bool parse_real(std::string_view text, double& out);

}  // namespace sdeest::csv
