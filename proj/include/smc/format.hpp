#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace smc {

/// Shortest decimal text that parses back to exactly `v`; "inf"/"-inf"/"nan"
/// for non-finite values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, end);
}

}  // namespace smc
