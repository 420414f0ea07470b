#pragma once

#include <array>
#include <charconv>
#include <string>

namespace uforest {

/// 17 significant digits (as "%.17g", independent of the C locale).
inline std::string format_g17(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return {buf.data(), res.ptr};
}

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_shortest(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

}  // namespace uforest
