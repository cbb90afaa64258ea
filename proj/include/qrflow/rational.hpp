#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "qrflow/errors.hpp"

namespace qrflow {

// All probability, matrix and index arithmetic is exact.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline Rat rat(long long n, long long d = 1) {
  if (d == 0) throw domain_error("rational with zero denominator");
  return Rat(n, d);
}

// Accepts "a", "a/b", optional leading sign on a; b > 0 after normalization.
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw parse_error("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw parse_error("rational literal with zero denominator: " + s);
    return Rat(num, den);
  } catch (const std::runtime_error& e) {
    throw parse_error("bad rational literal '" + s + "': " + e.what());
  }
}

// Canonical emission: lowest terms, "a" for integers, "a/b" otherwise.
inline std::string rat_str(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

inline bool is_integer(const Rat& r) { return denominator(r) == 1; }

inline double rat_double(const Rat& r) { return static_cast<double>(r); }

// r^k for integer k (k < 0 requires r != 0).
inline Rat rat_pow(const Rat& r, long long k) {
  if (k < 0) {
    if (r == 0) throw domain_error("negative power of zero");
    Rat inv = Rat(denominator(r), numerator(r));
    return rat_pow(inv, -k);
  }
  Rat acc(1), base = r;
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

}  // namespace qrflow
