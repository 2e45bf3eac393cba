#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace safemut::harness::detail {

/// Shortest round-trip text for a double; "nan" / "inf" / "-inf" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace safemut::harness::detail
