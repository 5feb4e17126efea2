#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "ncd/error.hpp"

namespace ncd::detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), b.size());
}

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!is) throw ValidationError("truncated binary stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline void put_magic(std::ostream& os, const char (&magic)[9], std::uint8_t version) {
  os.write(magic, 8);
  os.put(static_cast<char>(version));
}

inline std::uint8_t expect_magic(std::istream& is, const char (&magic)[9]) {
  std::array<char, 8> b{};
  is.read(b.data(), b.size());
  if (!is || std::string(b.data(), 8) != std::string(magic, 8)) {
    throw ValidationError("bad magic header, expected " + std::string(magic, 7));
  }
  const int version = is.get();
  if (!is) throw ValidationError("truncated binary stream");
  return static_cast<std::uint8_t>(version);
}

/// Shortest decimal form that round-trips.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace ncd::detail
