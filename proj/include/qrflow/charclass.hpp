#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qrflow/cyclotomic.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

// A cohomology class on a 4-manifold truncated to even degrees 0, 2, 4.
// Degree-2 entries are multiples of a fixed integral generator, so all
// arithmetic stays rational.
struct FormalClass {
  Rat r0, r2, r4;

  bool operator==(const FormalClass& o) const { return r0 == o.r0 && r2 == o.r2 && r4 == o.r4; }
};

inline FormalClass fc_mul(const FormalClass& a, const FormalClass& b) {
  FormalClass out;
  out.r0 = a.r0 * b.r0;
  out.r2 = a.r0 * b.r2 + a.r2 * b.r0;
  out.r4 = a.r0 * b.r4 + a.r2 * b.r2 + a.r4 * b.r0;
  return out;
}

inline FormalClass fc_add(const FormalClass& a, const FormalClass& b) {
  return {a.r0 + b.r0, a.r2 + b.r2, a.r4 + b.r4};
}

inline FormalClass fc_scale(const Rat& s, const FormalClass& a) {
  return {s * a.r0, s * a.r2, s * a.r4};
}

// ch(E) = rank + c1 + (c1^2/2 - c2), truncated at degree 4.
inline FormalClass chern_character(const Rat& rank, const Rat& c1, const Rat& c2) {
  return {rank, c1, c1 * c1 / 2 - c2};
}

// Chern classes from the power sums tau1 = sum x_i, tau2 = sum x_i^2:
// c1 = tau1, c2 = (tau1^2 - tau2)/2 by Newton's identity.
inline std::pair<Rat, Rat> chern_from_power_sums(const Rat& tau1, const Rat& tau2) {
  return {tau1, (tau1 * tau1 - tau2) / 2};
}

// A-hat genus truncated at degree 4: 1 - p1/24.
inline FormalClass a_hat(const Rat& p1) { return {Rat(1), Rat(0), -p1 / 24}; }

// Betti numbers of a closed oriented 4-manifold with the intersection-form
// split of the middle dimension.
struct BettiVector {
  Int b0 = 1, b1 = 0, b2 = 0, b3 = 0, b4 = 1;
  Int b_plus = 0, b_minus = 0;
};

inline void validate_betti(const BettiVector& b) {
  if (b.b0 < 0 || b.b1 < 0 || b.b2 < 0 || b.b3 < 0 || b.b4 < 0 || b.b_plus < 0 || b.b_minus < 0)
    throw input_error("Betti numbers must be nonnegative");
  if (b.b_plus + b.b_minus != b.b2)
    throw input_error("middle Betti number must split as b_plus + b_minus");
}

inline Int signature(const BettiVector& b) {
  validate_betti(b);
  return b.b_plus - b.b_minus;
}

inline Int euler_characteristic(const BettiVector& b) {
  validate_betti(b);
  return b.b0 - b.b1 + b.b2 - b.b3 + b.b4;
}

// An index value plus whether it is an integer, which it must be for inputs
// that come from an honest geometry.
struct IndexResult {
  Rat value;
  bool integral = false;
};

inline IndexResult make_index(const Rat& v) { return {v, is_integer(v)}; }

// Line-bundle index: -tau/8 + (1/2) integral of c1^2.
// The optional cross-check enforces integral p1 = 3 tau.
inline IndexResult index_line(const Rat& tau, const Rat& c1sq_integral,
                              bool check_p1 = false, const Rat& p1_integral = Rat(0)) {
  if (check_p1 && p1_integral != 3 * tau)
    throw input_error("first Pontryagin integral must equal three times the signature");
  return make_index(-tau / 8 + c1sq_integral / 2);
}

// Twisted Dirac index from the degree-4 part of ch(E) * A-hat:
// -rank * p1/24 + c1^2/2 - c2, all integrals over the 4-manifold.
inline IndexResult index_bundle(const Rat& rank, const Rat& p1_integral, const Rat& c1sq_integral,
                                const Rat& c2_integral) {
  FormalClass ch = chern_character(rank, Rat(0), Rat(0));
  FormalClass integrand = fc_mul(ch, a_hat(p1_integral));
  // The degree-4 product term uses the integrated values directly; the c1
  // and c2 contributions enter additively at degree 4.
  Rat value = integrand.r4 + c1sq_integral / 2 - c2_integral;
  return make_index(value);
}

// ---- Exact complex-rational linear algebra for the trace check ----

// Entries live in the Gaussian rationals, realized as order-4 cyclotomics.
struct CycMat {
  int n = 0;
  std::vector<Cyc> a;

  Cyc& at(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; }
  const Cyc& at(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; }
};

inline CycMat cyc_mat_identity(int n) {
  CycMat m;
  m.n = n;
  m.a.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), Cyc(0));
  for (int i = 0; i < n; ++i) m.at(i, i) = Cyc(1);
  return m;
}

inline CycMat cyc_mat_mul(const CycMat& x, const CycMat& y) {
  if (x.n != y.n) throw input_error("matrix size mismatch");
  CycMat out;
  out.n = x.n;
  out.a.assign(x.a.size(), Cyc(0));
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      if (x.at(i, k).is_zero()) continue;
      for (int j = 0; j < x.n; ++j) out.at(i, j) += x.at(i, k) * y.at(k, j);
    }
  return out;
}

inline Cyc cyc_mat_trace(const CycMat& m) {
  Cyc t;
  for (int i = 0; i < m.n; ++i) t += m.at(i, i);
  return t;
}

// Exact Gauss-Jordan inverse; throws on a singular matrix.
inline CycMat cyc_mat_inverse(const CycMat& m) {
  int n = m.n;
  CycMat work = m;
  CycMat inv = cyc_mat_identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!work.at(r, col).is_zero()) { pivot = r; break; }
    if (pivot < 0) throw domain_error("matrix is singular");
    if (pivot != col)
      for (int j = 0; j < n; ++j) {
        std::swap(work.at(pivot, j), work.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    Cyc scale = cyc_inv(work.at(col, col));
    for (int j = 0; j < n; ++j) {
      work.at(col, j) *= scale;
      inv.at(col, j) *= scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || work.at(r, col).is_zero()) continue;
      Cyc f = work.at(r, col);
      for (int j = 0; j < n; ++j) {
        work.at(r, j) -= f * work.at(col, j);
        inv.at(r, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

// Conjugation invariance of the trace, checked exactly on random matrices
// over the Gaussian rationals. Returns the number of trials performed.
inline int trace_invariance_check(int n, int trials, std::uint64_t seed) {
  if (n < 1 || n > 6) throw input_error("matrix size out of range 1..6");
  if (trials < 1) throw input_error("at least one trial required");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  auto random_entry = [&]() {
    Cyc re(Rat(num(rng), den(rng)));
    Cyc im = Cyc::zeta(4, 1) * Cyc(Rat(num(rng), den(rng)));
    return re + im;
  };
  int done = 0;
  for (int t = 0; t < trials; ++t) {
    CycMat g, m;
    g.n = m.n = n;
    g.a.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    m.a.resize(g.a.size());
    // Redraw until g is invertible; small random matrices almost always are.
    for (;;) {
      for (auto& e : g.a) e = random_entry();
      try {
        CycMat gi = cyc_mat_inverse(g);
        for (auto& e : m.a) e = random_entry();
        CycMat conj = cyc_mat_mul(cyc_mat_mul(g, m), gi);
        if (cyc_mat_trace(conj) != cyc_mat_trace(m))
          throw structure_error("trace changed under conjugation");
        break;
      } catch (const domain_error&) {
        continue;
      }
    }
    ++done;
  }
  return done;
}

// ---- Rank-2 tensor-square check ----

// For a rank-2 bundle with c1 = 0 and Chern roots {x, -x}, the tensor square
// has roots {2x, 0, 0, -2x}. Expanding the total Chern class with x^2 = -c2
// must give c2(E tensor E) = 4 c2(E). Verified by expanding the root product
// symbolically for each sample value.
inline bool su2_c2_check(const std::vector<Rat>& samples) {
  for (const Rat& c2 : samples) {
    // Pi (1 + k_i x) truncated at x^2, coefficients of {1, x, x^2}.
    auto expand = [](const std::vector<Int>& roots) {
      Rat e0(1), e1(0), e2(0);
      for (const Int& k : roots) {
        Rat nk(k);
        e2 = e2 + e1 * nk;
        e1 = e1 + nk;
      }
      return std::array<Rat, 3>{e0, e1, e2};
    };
    auto base = expand({Int(1), Int(-1)});
    auto square = expand({Int(2), Int(0), Int(0), Int(-2)});
    // Substitute x^2 = -c2.
    Rat c2_base = base[2] * -c2;
    Rat c2_square = square[2] * -c2;
    if (base[1] != 0 || square[1] != 0) return false;
    if (c2_base != c2) return false;
    if (c2_square != 4 * c2) return false;
  }
  return true;
}

}  // namespace qrflow
