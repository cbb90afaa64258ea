#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qrflow/errors.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

// Binary classification: a token either satisfies a type or it does not.
// Labels are pairwise distinct within each side; rel is total.
struct Classifier {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> types;
  std::vector<std::vector<bool>> rel;  // rel[token][type]

  Classifier() = default;
  Classifier(std::string id_, std::vector<std::string> tokens_,
             std::vector<std::string> types_, std::vector<std::vector<bool>> rel_)
      : id(std::move(id_)), tokens(std::move(tokens_)), types(std::move(types_)),
        rel(std::move(rel_)) {
    validate();
  }

  void validate() const {
    auto check_distinct = [](const std::vector<std::string>& v, const char* side) {
      std::set<std::string> seen;
      for (const auto& s : v)
        if (!seen.insert(s).second)
          throw input_error(std::string("duplicate ") + side + " label: " + s);
    };
    check_distinct(tokens, "token");
    check_distinct(types, "type");
    if (rel.size() != tokens.size())
      throw structure_error("relation must have one row per token");
    for (const auto& row : rel)
      if (row.size() != types.size())
        throw structure_error("relation row width must equal type count");
  }

  bool satisfies(int token, int type) const {
    return rel[static_cast<std::size_t>(token)][static_cast<std::size_t>(type)];
  }

  int token_index(const std::string& label) const {
    auto it = std::find(tokens.begin(), tokens.end(), label);
    if (it == tokens.end()) throw input_error("unknown token label: " + label);
    return static_cast<int>(it - tokens.begin());
  }

  int type_index(const std::string& label) const {
    auto it = std::find(types.begin(), types.end(), label);
    if (it == types.end()) throw input_error("unknown type label: " + label);
    return static_cast<int>(it - types.begin());
  }

  // Column of a type as a token bitmap.
  std::vector<bool> column(int type) const {
    std::vector<bool> col(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) col[t] = rel[t][static_cast<std::size_t>(type)];
    return col;
  }

  friend bool operator==(const Classifier& a, const Classifier& b) {
    return a.id == b.id && a.tokens == b.tokens && a.types == b.types && a.rel == b.rel;
  }
};

// Conjunction over M; the empty set is vacuously satisfied.
inline bool token_satisfies(const Classifier& c, int token, const std::vector<int>& M) {
  for (int a : M) {
    if (a < 0 || a >= static_cast<int>(c.types.size()))
      throw input_error("type index out of range");
    if (!c.satisfies(token, a)) return false;
  }
  return true;
}

struct Sequent {
  std::vector<int> lhs;  // antecedent types
  std::vector<int> rhs;  // consequent types
};

// M entails N: every token satisfying all of M satisfies all of N.
inline bool sequent_holds(const Classifier& c, const Sequent& s) {
  for (std::size_t t = 0; t < c.tokens.size(); ++t) {
    if (token_satisfies(c, static_cast<int>(t), s.lhs) &&
        !token_satisfies(c, static_cast<int>(t), s.rhs))
      return false;
  }
  return true;
}

struct InfomorphismReport {
  bool ok = true;
  // (dst token, src type) pairs where the adjointness condition fails.
  std::vector<std::pair<int, int>> violations;
};

// Checks the adjointness condition tok_map(b) |=_src a  <=>  b |=_dst typ_map(a)
// over all (b, a) without constructing an Infomorphism.
inline InfomorphismReport validate_infomorphism(const Classifier& src, const Classifier& dst,
                                                const std::vector<int>& tok_map,
                                                const std::vector<int>& typ_map) {
  if (tok_map.size() != dst.tokens.size())
    throw input_error("token map must be total on destination tokens");
  if (typ_map.size() != src.types.size())
    throw input_error("type map must be total on source types");
  for (int v : tok_map)
    if (v < 0 || v >= static_cast<int>(src.tokens.size()))
      throw input_error("token map image out of range");
  for (int v : typ_map)
    if (v < 0 || v >= static_cast<int>(dst.types.size()))
      throw input_error("type map image out of range");
  InfomorphismReport rep;
  for (int b = 0; b < static_cast<int>(dst.tokens.size()); ++b) {
    for (int a = 0; a < static_cast<int>(src.types.size()); ++a) {
      bool lhs = src.satisfies(tok_map[static_cast<std::size_t>(b)], a);
      bool rhs = dst.satisfies(b, typ_map[static_cast<std::size_t>(a)]);
      if (lhs != rhs) {
        rep.ok = false;
        rep.violations.emplace_back(b, a);
      }
    }
  }
  return rep;
}

// Contravariant on tokens, covariant on types. Construction rejects any
// (token, type) pair violating adjointness.
struct Infomorphism {
  Classifier src, dst;
  std::vector<int> tok_map;  // dst token -> src token
  std::vector<int> typ_map;  // src type -> dst type

  Infomorphism(Classifier src_, Classifier dst_, std::vector<int> tok_map_,
               std::vector<int> typ_map_)
      : src(std::move(src_)), dst(std::move(dst_)), tok_map(std::move(tok_map_)),
        typ_map(std::move(typ_map_)) {
    auto rep = validate_infomorphism(src, dst, tok_map, typ_map);
    if (!rep.ok) {
      auto [b, a] = rep.violations.front();
      throw structure_error("adjointness fails at (token '" + dst.tokens[static_cast<std::size_t>(b)] +
                            "', type '" + src.types[static_cast<std::size_t>(a)] + "') and " +
                            std::to_string(rep.violations.size() - 1) + " more pair(s)");
    }
  }
};

inline Infomorphism identity_infomorphism(const Classifier& c) {
  std::vector<int> tok(c.tokens.size()), typ(c.types.size());
  for (std::size_t i = 0; i < tok.size(); ++i) tok[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < typ.size(); ++i) typ[i] = static_cast<int>(i);
  return Infomorphism(c, c, tok, typ);
}

// f: A -> B followed by g: B -> C. Token maps compose contravariantly.
inline Infomorphism compose(const Infomorphism& f, const Infomorphism& g) {
  if (!(f.dst == g.src))
    throw structure_error("composition endpoint mismatch: '" + f.dst.id + "' vs '" + g.src.id + "'");
  std::vector<int> tok(g.dst.tokens.size()), typ(f.src.types.size());
  for (std::size_t c = 0; c < tok.size(); ++c)
    tok[c] = f.tok_map[static_cast<std::size_t>(g.tok_map[c])];
  for (std::size_t a = 0; a < typ.size(); ++a)
    typ[a] = g.typ_map[static_cast<std::size_t>(f.typ_map[a])];
  return Infomorphism(f.src, g.dst, tok, typ);
}

// ---- Probabilistic layer (uniform counting measure on tokens) ----

inline long long count_satisfying(const Classifier& c, const std::vector<int>& M) {
  long long n = 0;
  for (std::size_t t = 0; t < c.tokens.size(); ++t)
    if (token_satisfies(c, static_cast<int>(t), M)) ++n;
  return n;
}

// P(N | M) = |sat(M and N)| / |sat(M)|.  N = {} gives 1.
inline Rat conditional_probability(const Classifier& c, const std::vector<int>& M,
                                   const std::vector<int>& N) {
  long long m = count_satisfying(c, M);
  if (m == 0) throw domain_error("conditional probability undefined: no token satisfies the condition");
  std::vector<int> both = M;
  both.insert(both.end(), N.begin(), N.end());
  return Rat(count_satisfying(c, both), m);
}

// posterior = likelihood(evidence | hypothesis) * prior(hypothesis) / evidence.
inline Rat bayes_posterior(const Classifier& c, const std::vector<int>& hypothesis,
                           const std::vector<int>& evidence) {
  if (c.tokens.empty()) throw domain_error("bayes posterior undefined on empty token set");
  long long e = count_satisfying(c, evidence);
  if (e == 0) throw domain_error("bayes posterior undefined: evidence has probability zero");
  Rat likelihood = conditional_probability(c, hypothesis, evidence);
  Rat prior(count_satisfying(c, hypothesis), static_cast<long long>(c.tokens.size()));
  Rat ev(e, static_cast<long long>(c.tokens.size()));
  Rat post = likelihood * prior / ev;
  if (post > 1) throw domain_error("inconsistent probability assignment: posterior exceeds 1");
  return post;
}

// ---- Belief propagation toward a core ----

struct BeliefNode {
  std::string id;
  int n_alts = 1;
  std::vector<Rat> prior;  // required on sources, empty elsewhere
};

struct BeliefEdge {
  int src = 0, dst = 0;
  std::vector<std::vector<Rat>> table;  // table[dst_alt][src_alt]
};

struct BeliefDiagram {
  std::vector<BeliefNode> nodes;
  std::vector<BeliefEdge> edges;
  int core = 0;
};

struct BeliefResult {
  std::vector<Rat> pre_normalization;
  std::vector<Rat> normalized;
};

// Multiplies conditionals along paths, combines parallel incoming messages by
// componentwise product, renormalizes over the core's alternatives.
inline BeliefResult propagate_beliefs(const BeliefDiagram& d) {
  int n = static_cast<int>(d.nodes.size());
  if (d.core < 0 || d.core >= n) throw input_error("core index out of range");
  for (const auto& e : d.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw input_error("belief edge endpoint out of range");
    if (static_cast<int>(e.table.size()) != d.nodes[static_cast<std::size_t>(e.dst)].n_alts)
      throw input_error("conditional table row count must match destination alternatives");
    for (const auto& row : e.table)
      if (static_cast<int>(row.size()) != d.nodes[static_cast<std::size_t>(e.src)].n_alts)
        throw input_error("conditional table column count must match source alternatives");
  }

  // Kahn topological order; a leftover node means a directed cycle.
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const auto& e : d.edges) ++indeg[static_cast<std::size_t>(e.dst)];
  std::vector<int> order, queue;
  for (int v = 0; v < n; ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
  for (std::size_t q = 0; q < queue.size(); ++q) {
    int v = queue[q];
    order.push_back(v);
    for (const auto& e : d.edges)
      if (e.src == v && --indeg[static_cast<std::size_t>(e.dst)] == 0) queue.push_back(e.dst);
  }
  if (static_cast<int>(order.size()) != n)
    throw structure_error("belief diagram contains a directed cycle");

  std::vector<std::vector<Rat>> belief(static_cast<std::size_t>(n));
  for (int v : order) {
    const auto& node = d.nodes[static_cast<std::size_t>(v)];
    std::vector<Rat> b;
    bool has_incoming = false;
    for (std::size_t ei = 0; ei < d.edges.size(); ++ei) {
      const auto& e = d.edges[ei];
      if (e.dst != v) continue;
      // message = table * belief(src)
      std::vector<Rat> msg(static_cast<std::size_t>(node.n_alts), Rat(0));
      const auto& sb = belief[static_cast<std::size_t>(e.src)];
      for (int i = 0; i < node.n_alts; ++i)
        for (std::size_t j = 0; j < sb.size(); ++j)
          msg[static_cast<std::size_t>(i)] += e.table[static_cast<std::size_t>(i)][j] * sb[j];
      if (!has_incoming) {
        b = std::move(msg);
        has_incoming = true;
      } else {
        for (int i = 0; i < node.n_alts; ++i)
          b[static_cast<std::size_t>(i)] *= msg[static_cast<std::size_t>(i)];
      }
    }
    if (!has_incoming) {
      if (node.prior.empty())
        throw input_error("source node '" + node.id + "' requires a prior");
      if (static_cast<int>(node.prior.size()) != node.n_alts)
        throw input_error("prior length must match alternatives on '" + node.id + "'");
      b = node.prior;
    }
    belief[static_cast<std::size_t>(v)] = std::move(b);
  }

  BeliefResult res;
  res.pre_normalization = belief[static_cast<std::size_t>(d.core)];
  Rat total(0);
  for (const auto& x : res.pre_normalization) total += x;
  if (total == 0) throw domain_error("core belief has zero total mass");
  res.normalized = res.pre_normalization;
  for (auto& x : res.normalized) x /= total;
  return res;
}

}  // namespace qrflow
