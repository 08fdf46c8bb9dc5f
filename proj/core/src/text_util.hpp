#pragma once

#include <charconv>
#include <string>

namespace sdclust::detail {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace sdclust::detail
