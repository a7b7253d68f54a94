#pragma once

#include <array>
#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "embstab/error.hpp"

namespace embstab {

/// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw NumericError("failed to format double");
  return std::string(buf.data(), end);
}

/// Lossless hex-float representation (shorter to parse back than decimal).
inline std::string format_double_hex(double v) {
  std::array<char, 64> buf;
  auto [end, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::hex);
  if (ec != std::errc{}) throw NumericError("failed to format double");
  // The sign sits before the 0x prefix, where strtod expects it.
  const char* digits = buf.data();
  std::string out;
  if (*digits == '-') {
    out += '-';
    ++digits;
  }
  out += "0x";
  out.append(digits, static_cast<std::size_t>(end - digits));
  return out;
}

/// Parses a full token as a double; accepts decimal and 0x... hex floats.
/// Returns false if the token is not entirely consumed or not a number.
inline bool parse_double(std::string_view token, double& out) {
  if (token.empty()) return false;
  std::string tmp(token);  // strtod needs a terminated buffer
  const char* begin = tmp.c_str();
  char* end = nullptr;
  errno = 0;
  out = std::strtod(begin, &end);
  return end == begin + tmp.size() && errno != ERANGE;
}

inline bool parse_u64(std::string_view token, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && p == token.data() + token.size();
}

/// Splits on runs of spaces and tabs.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace embstab
