#pragma once

#include <charconv>
#include <string>

namespace pfp {

/// Locale-independent, 12 significant digits, '.' decimal separator.
inline std::string format_number(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

}  // namespace pfp
