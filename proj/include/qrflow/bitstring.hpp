#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrflow/errors.hpp"

namespace qrflow {

// Fixed-width bit string. Position 0 is the leftmost character; the register
// basis index reads the string as a big-endian binary numeral, so position 0
// is the most significant bit.
struct BitString {
  int width = 0;
  std::uint32_t bits = 0;  // value of the big-endian reading

  BitString() = default;
  BitString(int w, std::uint32_t value) : width(w), bits(value) {
    if (w < 1 || w > 20) throw input_error("bit-string width out of range [1,20]");
    if (w < 20 && value >> w) throw input_error("bit-string value exceeds width");
  }

  static BitString parse(const std::string& s) {
    if (s.empty()) throw input_error("empty bit string");
    std::uint32_t v = 0;
    for (char c : s) {
      if (c != '0' && c != '1') throw input_error("bit string must be over {0,1}: " + s);
      v = (v << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return BitString(static_cast<int>(s.size()), v);
  }

  int get(int pos) const {
    if (pos < 0 || pos >= width) throw input_error("bit position out of range");
    return static_cast<int>((bits >> (width - 1 - pos)) & 1u);
  }

  BitString with(int pos, int value) const {
    std::uint32_t mask = 1u << (width - 1 - pos);
    return BitString(width, value ? (bits | mask) : (bits & ~mask));
  }

  std::uint32_t index() const { return bits; }

  std::string str() const {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i) s[static_cast<std::size_t>(i)] += static_cast<char>(get(i));
    return s;
  }

  BitString complement() const {
    std::uint32_t mask = (width == 20) ? 0xFFFFFu : ((1u << width) - 1u);
    return BitString(width, ~bits & mask);
  }

  // Substring over the given positions, in the order listed.
  BitString slice(const std::vector<int>& positions) const {
    std::uint32_t v = 0;
    for (int p : positions) v = (v << 1) | static_cast<std::uint32_t>(get(p));
    return BitString(static_cast<int>(positions.size()), v);
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.width == b.width && a.bits == b.bits;
  }
  friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }
  friend bool operator<(const BitString& a, const BitString& b) {
    return a.width != b.width ? a.width < b.width : a.bits < b.bits;
  }
};

inline std::uint32_t token_count(int width) { return 1u << width; }

inline BitString token_at(int width, std::uint32_t index) { return BitString(width, index); }

// Identity permutation table on {0,1}^width indices.
inline std::vector<std::uint32_t> identity_perm(int width) {
  std::vector<std::uint32_t> p(token_count(width));
  for (std::uint32_t i = 0; i < p.size(); ++i) p[i] = i;
  return p;
}

inline bool is_permutation_table(const std::vector<std::uint32_t>& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::uint32_t v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

}  // namespace qrflow
