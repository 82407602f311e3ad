#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include "hfo/error.hpp"

namespace hfo::detail {

/// Shortest round-trip decimal form; locale-independent and deterministic.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error::internal("double formatting failed");
  return std::string(buf, ptr);
}

/// Fixed-precision form for rendered output (SVG coordinates, tables).
inline std::string fmt_fixed(double v, int precision) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  if (ec != std::errc{}) throw Error::internal("double formatting failed");
  return std::string(buf, ptr);
}

/// Full-token double parse; returns false on trailing garbage or empty input.
inline bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !token.empty();
}

} // namespace hfo::detail
