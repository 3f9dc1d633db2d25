#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace tnloss {

/// Shortest round-trip decimal text for a double; locale-free and deterministic.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) return "?";
  return std::string(buf, res.ptr);
}

}  // namespace tnloss
