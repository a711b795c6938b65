#pragma once

#include <charconv>
#include <string>

namespace cqed {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace cqed
