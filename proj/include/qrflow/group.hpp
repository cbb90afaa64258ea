#pragma once

#include <array>
#include <string>
#include <vector>

#include "qrflow/cyclotomic.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/ratmat.hpp"

namespace qrflow {

// Finite group as explicit tables, with its full character table in exact
// cyclotomic values and, where the irreps are rational, explicit matrices.
struct FiniteGroup {
  std::string name;
  int order = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<int>> mul;  // mul[a][b] = a*b
  std::vector<int> inverse;
  int identity = 0;
  bool abelian = false;
  int root_order = 1;  // cyclotomic order hosting the character values

  std::vector<int> irrep_dims;
  std::vector<std::vector<Cyc>> characters;       // characters[r][g]
  std::vector<std::vector<RatMat>> irrep_mats;    // rational irreps only; [r][g]

  int times(int a, int b) const { return mul[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inv(int a) const { return inverse[static_cast<std::size_t>(a)]; }
  int irrep_count() const { return static_cast<int>(characters.size()); }
};

// Exhaustive table checks plus character orthogonality; cheap for |G| <= 24.
inline void validate_group(const FiniteGroup& g) {
  int n = g.order;
  if (n < 1 || n > 24) throw input_error("group order out of range [1,24]");
  if (static_cast<int>(g.labels.size()) != n || static_cast<int>(g.mul.size()) != n ||
      static_cast<int>(g.inverse.size()) != n)
    throw input_error("group table sizes mismatch");
  for (const auto& row : g.mul) {
    if (static_cast<int>(row.size()) != n) throw input_error("multiplication row size mismatch");
    for (int v : row)
      if (v < 0 || v >= n) throw input_error("multiplication entry out of range");
  }
  for (int a = 0; a < n; ++a) {
    if (g.times(g.identity, a) != a || g.times(a, g.identity) != a)
      throw structure_error("identity law fails");
    if (g.times(g.inv(a), a) != g.identity || g.times(a, g.inv(a)) != g.identity)
      throw structure_error("inverse law fails");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (g.times(g.times(a, b), c) != g.times(a, g.times(b, c)))
          throw structure_error("associativity fails");
  if (g.characters.empty()) throw input_error("character table required");
  if (g.irrep_dims.size() != g.characters.size())
    throw input_error("one dimension per irrep required");
  // Row orthogonality: sum_g chi_r(g) conj(chi_s(g)) = |G| [r = s].
  for (std::size_t r = 0; r < g.characters.size(); ++r) {
    if (static_cast<int>(g.characters[r].size()) != n)
      throw input_error("character row size mismatch");
    for (std::size_t s = 0; s <= r; ++s) {
      Cyc acc;
      for (int e = 0; e < n; ++e)
        acc += g.characters[r][static_cast<std::size_t>(e)] *
               cyc_conj(g.characters[s][static_cast<std::size_t>(e)]);
      Cyc want = (r == s) ? Cyc(Rat(n)) : Cyc(Rat(0));
      if (acc != want) throw structure_error("character orthogonality fails");
    }
  }
  // Sum of squared irrep dimensions equals the order.
  int dimsq = 0;
  for (int d : g.irrep_dims) dimsq += d * d;
  if (dimsq != n) throw structure_error("irrep dimensions do not fill the group order");
  // Explicit matrices, when present, must be homomorphisms with the right traces.
  for (std::size_t r = 0; r < g.irrep_mats.size(); ++r) {
    if (g.irrep_mats[r].empty()) continue;
    if (static_cast<int>(g.irrep_mats[r].size()) != n)
      throw input_error("irrep matrix table size mismatch");
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b)
        if (mat_mul(g.irrep_mats[r][static_cast<std::size_t>(a)],
                    g.irrep_mats[r][static_cast<std::size_t>(b)]) !=
            g.irrep_mats[r][static_cast<std::size_t>(g.times(a, b))])
          throw structure_error("irrep matrices are not a homomorphism");
      Rat tr = 0;
      const auto& m = g.irrep_mats[r][static_cast<std::size_t>(a)];
      for (int i = 0; i < m.rows; ++i) tr += m.at(i, i);
      if (Cyc(tr) != g.characters[r][static_cast<std::size_t>(a)])
        throw structure_error("irrep matrix trace disagrees with the character");
    }
  }
}

// Z_n with characters chi_r(k) = zeta_n^(rk).
inline FiniteGroup make_cyclic(int n) {
  if (n < 1 || n > 24) throw input_error("cyclic order out of range [1,24]");
  FiniteGroup g;
  g.name = "z" + std::to_string(n);
  g.order = n;
  g.abelian = true;
  g.identity = 0;
  g.root_order = n;
  for (int k = 0; k < n; ++k) g.labels.push_back(std::to_string(k));
  g.mul.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  g.inverse.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    g.inverse[static_cast<std::size_t>(a)] = (n - a) % n;
    for (int b = 0; b < n; ++b) g.mul[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
  }
  for (int r = 0; r < n; ++r) {
    g.irrep_dims.push_back(1);
    std::vector<Cyc> row;
    for (int k = 0; k < n; ++k) row.push_back(Cyc::zeta(n, static_cast<long long>(r) * k));
    g.characters.push_back(std::move(row));
  }
  validate_group(g);
  return g;
}

// Permutations of {0,1,2}: identity, the three transpositions, both 3-cycles.
// All three irreps are rational; the 2-dimensional one acts on the sum-zero
// plane in the basis (e0-e1, e1-e2).
inline FiniteGroup make_s3() {
  const std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2},  // ()
      {1, 0, 2},  // (01)
      {2, 1, 0},  // (02)
      {0, 2, 1},  // (12)
      {1, 2, 0},  // (012): 0->1, 1->2, 2->0
      {2, 0, 1},  // (021)
  }};
  const std::array<const char*, 6> names{"()", "(01)", "(02)", "(12)", "(012)", "(021)"};

  FiniteGroup g;
  g.name = "s3";
  g.order = 6;
  g.abelian = false;
  g.identity = 0;
  g.root_order = 1;
  for (const char* s : names) g.labels.push_back(s);

  auto compose = [&](int a, int b) {  // (a*b)(x) = a(b(x))
    std::array<int, 3> c{};
    for (int x = 0; x < 3; ++x) c[static_cast<std::size_t>(x)] = perms[static_cast<std::size_t>(a)][static_cast<std::size_t>(perms[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)])];
    for (std::size_t i = 0; i < perms.size(); ++i)
      if (perms[i] == c) return static_cast<int>(i);
    throw structure_error("permutation composition fell outside the table");
  };
  g.mul.assign(6, std::vector<int>(6));
  g.inverse.assign(6, 0);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      g.mul[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = compose(a, b);
      if (g.mul[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == 0)
        g.inverse[static_cast<std::size_t>(a)] = b;
    }

  // Matrices: trivial, sign, and the standard rep from the permutation action
  // pi.e_i = e_{pi(i)} restricted to the sum-zero plane.
  auto standard_mat = [&](int a) {
    RatMat m(2, 2);
    auto coords = [&](int from, int to) {  // e_from - e_to in the (u1, u2) basis
      std::array<int, 3> x{};
      x[static_cast<std::size_t>(from)] += 1;
      x[static_cast<std::size_t>(to)] -= 1;
      return std::pair<int, int>(x[0], -x[2]);
    };
    auto [a11, a21] = coords(perms[static_cast<std::size_t>(a)][0], perms[static_cast<std::size_t>(a)][1]);
    auto [a12, a22] = coords(perms[static_cast<std::size_t>(a)][1], perms[static_cast<std::size_t>(a)][2]);
    m.at(0, 0) = a11;
    m.at(1, 0) = a21;
    m.at(0, 1) = a12;
    m.at(1, 1) = a22;
    return m;
  };
  auto sign_of = [&](int a) { return (a >= 1 && a <= 3) ? -1 : 1; };

  g.irrep_dims = {1, 1, 2};
  g.characters.resize(3);
  g.irrep_mats.resize(3);
  for (int a = 0; a < 6; ++a) {
    g.characters[0].push_back(Cyc(1));
    g.characters[1].push_back(Cyc(sign_of(a)));
    RatMat m = standard_mat(a);
    g.characters[2].push_back(Cyc(m.at(0, 0) + m.at(1, 1)));
    RatMat one(1, 1);
    one.at(0, 0) = 1;
    RatMat sgn(1, 1);
    sgn.at(0, 0) = sign_of(a);
    g.irrep_mats[0].push_back(one);
    g.irrep_mats[1].push_back(sgn);
    g.irrep_mats[2].push_back(m);
  }
  validate_group(g);
  return g;
}

// Group selection by the CLI names z1..z24 and s3.
inline FiniteGroup group_by_name(const std::string& name) {
  if (name == "s3") return make_s3();
  if (name.size() >= 2 && name[0] == 'z') {
    int n = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') throw input_error("unknown group '" + name + "'");
      n = n * 10 + (name[i] - '0');
    }
    return make_cyclic(n);
  }
  throw input_error("unknown group '" + name + "'");
}

}  // namespace qrflow
