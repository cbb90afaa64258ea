#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qrflow/errors.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

// Little-endian rational polynomials, no trailing zeros.
namespace polydetail {

inline void poly_trim(std::vector<Rat>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline std::vector<Rat> poly_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Rat> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  poly_trim(out);
  return out;
}

// Exact division with remainder by a nonzero divisor.
inline std::pair<std::vector<Rat>, std::vector<Rat>> poly_divmod(std::vector<Rat> num,
                                                                 const std::vector<Rat>& den) {
  poly_trim(num);
  if (den.empty()) throw domain_error("polynomial division by zero");
  std::vector<Rat> quot;
  if (num.size() >= den.size()) quot.resize(num.size() - den.size() + 1);
  Rat lead = den.back();
  while (num.size() >= den.size()) {
    Rat f = num.back() / lead;
    std::size_t shift = num.size() - den.size();
    quot[shift] = f;
    for (std::size_t i = 0; i < den.size(); ++i) num[shift + i] -= f * den[i];
    poly_trim(num);  // the leading term cancels exactly, so this shrinks num
  }
  poly_trim(quot);
  return {quot, num};
}

}  // namespace polydetail

namespace detail {

struct CycTables {
  int n = 1;
  std::vector<Rat> phi;                 // minimal polynomial of zeta_n, monic
  int deg = 1;                          // Euler phi(n)
  std::vector<std::vector<Rat>> zpow;   // zeta^k in the power basis, k = 0..n-1
};

inline std::vector<Rat> cyclotomic_poly(int n, std::map<int, std::vector<Rat>>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  if (n == 1) return memo[1] = {Rat(-1), Rat(1)};
  // x^n - 1 divided by the product of lower cyclotomics at divisors of n.
  std::vector<Rat> num(static_cast<std::size_t>(n) + 1);
  num[0] = -1;
  num[static_cast<std::size_t>(n)] = 1;
  std::vector<Rat> den{Rat(1)};
  for (int d = 1; d < n; ++d)
    if (n % d == 0) den = polydetail::poly_mul(den, cyclotomic_poly(d, memo));
  auto [quot, rem] = polydetail::poly_divmod(num, den);
  if (!rem.empty()) throw domain_error("cyclotomic division left a remainder");
  return memo[n] = quot;
}

inline const CycTables& cyc_tables(int n) {
  if (n < 1 || n > 1000) throw input_error("cyclotomic order out of range");
  static std::map<int, CycTables> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  static std::map<int, std::vector<Rat>> memo;
  CycTables t;
  t.n = n;
  t.phi = cyclotomic_poly(n, memo);
  t.deg = static_cast<int>(t.phi.size()) - 1;
  // zeta^k by repeatedly multiplying by x and reducing mod phi.
  std::vector<Rat> cur(static_cast<std::size_t>(t.deg));
  cur[0] = 1;
  for (int k = 0; k < n; ++k) {
    t.zpow.push_back(cur);
    std::vector<Rat> next(static_cast<std::size_t>(t.deg));
    // next = x*cur mod phi: shift up, fold the overflow with -phi's lower part.
    Rat top = cur[static_cast<std::size_t>(t.deg) - 1];
    for (int i = t.deg - 1; i > 0; --i) next[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)];
    next[0] = 0;
    if (top != 0)
      for (int i = 0; i < t.deg; ++i) next[static_cast<std::size_t>(i)] -= top * t.phi[static_cast<std::size_t>(i)];
    cur = std::move(next);
  }
  return cache.emplace(n, std::move(t)).first->second;
}

}  // namespace detail

// Element of the cyclotomic field Q(zeta_order), stored in the power basis
// modulo the order's minimal polynomial. order 1 is the rationals.
struct Cyc {
  int order = 1;
  std::vector<Rat> c{Rat(0)};

  Cyc() = default;
  Cyc(const Rat& r) : order(1), c{r} {}
  Cyc(int v) : order(1), c{Rat(v)} {}

  static Cyc zeta(int n, long long k) {
    const auto& t = detail::cyc_tables(n);
    long long kk = ((k % n) + n) % n;
    Cyc out;
    out.order = n;
    out.c = t.zpow[static_cast<std::size_t>(kk)];
    return out;
  }

  bool is_zero() const {
    for (const auto& v : c)
      if (v != 0) return false;
    return true;
  }

  bool is_rational() const {
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i] != 0) return false;
    return true;
  }

  Rat rat() const {
    if (!is_rational()) throw domain_error("value is not rational");
    return c.empty() ? Rat(0) : c[0];
  }
};

namespace detail {

// Rewrites v in Q(zeta_m); requires v.order | m.
inline Cyc cyc_embed(const Cyc& v, int m) {
  if (v.order == m) return v;
  if (m % v.order != 0) throw input_error("cyclotomic orders are incompatible");
  const auto& t = cyc_tables(m);
  long long step = m / v.order;
  Cyc out;
  out.order = m;
  out.c.assign(static_cast<std::size_t>(t.deg), Rat(0));
  for (std::size_t k = 0; k < v.c.size(); ++k) {
    if (v.c[k] == 0) continue;
    const auto& pw = t.zpow[static_cast<std::size_t>((step * static_cast<long long>(k)) % m)];
    for (int i = 0; i < t.deg; ++i) out.c[static_cast<std::size_t>(i)] += v.c[k] * pw[static_cast<std::size_t>(i)];
  }
  return out;
}

inline int cyc_align(Cyc& a, Cyc& b) {
  if (a.order == b.order) return a.order;
  int l = std::lcm(a.order, b.order);
  a = cyc_embed(a, l);
  b = cyc_embed(b, l);
  return l;
}

}  // namespace detail

inline bool operator==(const Cyc& x, const Cyc& y) {
  Cyc a = x, b = y;
  detail::cyc_align(a, b);
  return a.c == b.c;
}
inline bool operator!=(const Cyc& x, const Cyc& y) { return !(x == y); }

inline Cyc operator+(const Cyc& x, const Cyc& y) {
  Cyc a = x, b = y;
  detail::cyc_align(a, b);
  for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
  return a;
}

inline Cyc operator-(const Cyc& x, const Cyc& y) {
  Cyc a = x, b = y;
  detail::cyc_align(a, b);
  for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
  return a;
}

inline Cyc operator-(const Cyc& x) {
  Cyc a = x;
  for (auto& v : a.c) v = -v;
  return a;
}

inline Cyc operator*(const Cyc& x, const Cyc& y) {
  Cyc a = x, b = y;
  int n = detail::cyc_align(a, b);
  const auto& t = detail::cyc_tables(n);
  auto prod = polydetail::poly_mul(a.c, b.c);
  auto [quot, rem] = polydetail::poly_divmod(prod, t.phi);
  (void)quot;
  Cyc out;
  out.order = n;
  out.c.assign(static_cast<std::size_t>(t.deg), Rat(0));
  for (std::size_t i = 0; i < rem.size(); ++i) out.c[i] = rem[i];
  return out;
}

inline Cyc& operator+=(Cyc& a, const Cyc& b) { return a = a + b; }
inline Cyc& operator-=(Cyc& a, const Cyc& b) { return a = a - b; }
inline Cyc& operator*=(Cyc& a, const Cyc& b) { return a = a * b; }

// Complex conjugation: zeta^k -> zeta^(n-k).
inline Cyc cyc_conj(const Cyc& v) {
  const auto& t = detail::cyc_tables(v.order);
  Cyc out;
  out.order = v.order;
  out.c.assign(static_cast<std::size_t>(t.deg), Rat(0));
  for (std::size_t k = 0; k < v.c.size(); ++k) {
    if (v.c[k] == 0) continue;
    const auto& pw = t.zpow[static_cast<std::size_t>((v.order - static_cast<int>(k)) % v.order)];
    for (int i = 0; i < t.deg; ++i) out.c[static_cast<std::size_t>(i)] += v.c[k] * pw[static_cast<std::size_t>(i)];
  }
  return out;
}

// Inverse via the extended Euclidean algorithm against the minimal
// polynomial: u*v + w*phi = gcd, and the gcd is a nonzero constant.
inline Cyc cyc_inv(const Cyc& v) {
  if (v.is_zero()) throw domain_error("division by zero");
  if (v.is_rational()) {
    Cyc out;
    out.order = v.order;
    out.c.assign(v.c.size(), Rat(0));
    out.c[0] = Rat(1) / v.c[0];
    return out;
  }
  const auto& t = detail::cyc_tables(v.order);
  std::vector<Rat> r0 = t.phi, r1 = v.c;
  polydetail::poly_trim(r1);
  std::vector<Rat> s0{}, s1{Rat(1)};  // coefficients on v
  while (!r1.empty()) {
    auto [q, r] = polydetail::poly_divmod(r0, r1);
    std::vector<Rat> s2 = s0;
    auto qs = polydetail::poly_mul(q, s1);
    if (s2.size() < qs.size()) s2.resize(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
    polydetail::poly_trim(s2);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.size() != 1) throw domain_error("value is a zero divisor mod the minimal polynomial");
  Rat g = r0[0];
  Cyc out;
  out.order = v.order;
  out.c.assign(static_cast<std::size_t>(t.deg), Rat(0));
  for (std::size_t i = 0; i < s0.size() && i < out.c.size(); ++i) out.c[i] = s0[i] / g;
  return out;
}

inline Cyc operator/(const Cyc& x, const Cyc& y) { return x * cyc_inv(y); }

inline Cyc cyc_abs_sq(const Cyc& v) { return v * cyc_conj(v); }

// Numeric approximation for display and ranking.
inline std::pair<long double, long double> cyc_approx(const Cyc& v) {
  long double re = 0, im = 0;
  const long double tau = 6.283185307179586476925286766559L;
  for (std::size_t k = 0; k < v.c.size(); ++k) {
    if (v.c[k] == 0) continue;
    long double coef = static_cast<long double>(rat_double(v.c[k]));
    long double ang = tau * static_cast<long double>(k) / static_cast<long double>(v.order);
    re += coef * std::cos(ang);
    im += coef * std::sin(ang);
  }
  return {re, im};
}

// Canonical text form: rational when possible, else a polynomial in z{n}.
inline std::string cyc_str(const Cyc& v) {
  if (v.is_rational()) return rat_str(v.c.empty() ? Rat(0) : v.c[0]);
  std::string out;
  std::string gen = "z" + std::to_string(v.order);
  for (std::size_t k = 0; k < v.c.size(); ++k) {
    if (v.c[k] == 0) continue;
    std::string term;
    if (k == 0) {
      term = rat_str(v.c[k]);
    } else {
      Rat coef = v.c[k];
      std::string mag = rat_str(coef < 0 ? -coef : coef);
      term = (coef < 0 ? "-" : "");
      if (mag != "1") term += mag + "*";
      term += gen;
      if (k > 1) term += "^" + std::to_string(k);
    }
    if (!out.empty() && term[0] != '-') out += "+";
    out += term;
  }
  return out;
}

}  // namespace qrflow
