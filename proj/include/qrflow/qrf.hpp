#pragma once

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qrflow/bitstring.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

// Measure/prepare machine with a single pointer state: measurement answers
// "is this the pointer?", preparation writes a state compatible with the
// requested outcome.
struct ElementaryQRF {
  int width = 0;
  BitString pointer;

  ElementaryQRF() = default;
  ElementaryQRF(int w, BitString p) : width(w), pointer(p) {
    if (p.width != w) throw input_error("pointer width must match machine width");
  }

  int measure(const BitString& x) const {
    if (x.width != width) throw input_error("measured string width mismatch");
    return x == pointer ? 1 : 0;
  }

  // Outcome 1 determines the pointer. Outcome 0 only rules the pointer out,
  // so an explicit non-pointer target is required.
  BitString prepare(int outcome, std::optional<BitString> target = std::nullopt) const {
    if (outcome != 0 && outcome != 1) throw input_error("outcome must be 0 or 1");
    if (target && target->width != width) throw input_error("target width mismatch");
    if (outcome == 1) {
      if (target && *target != pointer)
        throw domain_error("contradictory preparation: outcome 1 with non-pointer target");
      return pointer;
    }
    if (!target) throw domain_error("under-determined preparation: outcome 0 needs a target");
    if (*target == pointer)
      throw domain_error("contradictory preparation: outcome 0 with the pointer as target");
    return *target;
  }
};

struct CompositeMeasurement {
  std::vector<int> one_hot;        // per member outcome
  std::optional<int> member;       // index of the matching member, if any
};

// n <= width member machines with pairwise distinct pointers.
struct CompositeQRF {
  int width = 0;
  std::vector<BitString> pointers;

  CompositeQRF() = default;
  CompositeQRF(int w, std::vector<BitString> ps) : width(w), pointers(std::move(ps)) {
    if (pointers.empty()) throw input_error("composite machine needs at least one member");
    if (static_cast<int>(pointers.size()) > width)
      throw input_error("composite machine cannot have more members than bits");
    std::set<BitString> seen;
    for (const auto& p : pointers) {
      if (p.width != width) throw input_error("pointer width must match machine width");
      if (!seen.insert(p).second) throw input_error("duplicate pointer: " + p.str());
    }
  }

  bool fine_grained() const { return static_cast<int>(pointers.size()) == width; }

  CompositeMeasurement measure(const BitString& x) const {
    if (x.width != width) throw input_error("measured string width mismatch");
    CompositeMeasurement m;
    m.one_hot.resize(pointers.size(), 0);
    for (std::size_t j = 0; j < pointers.size(); ++j) {
      if (x == pointers[j]) {
        m.one_hot[j] = 1;
        m.member = static_cast<int>(j);
      }
    }
    return m;
  }
};

// keep lists surviving member indices; an empty selection is degenerate.
inline CompositeQRF coarse_grain(const CompositeQRF& q, const std::vector<int>& keep) {
  if (keep.empty()) throw domain_error("degenerate coarse-graining: no members kept");
  std::vector<BitString> kept;
  std::set<int> seen;
  for (int j : keep) {
    if (j < 0 || j >= static_cast<int>(q.pointers.size()))
      throw input_error("member index out of range");
    if (!seen.insert(j).second) throw input_error("duplicate member index in keep list");
    kept.push_back(q.pointers[static_cast<std::size_t>(j)]);
  }
  return CompositeQRF(q.width, kept);
}

// Column-stochastic transition table over explicit candidate pointers:
// p[i][j] is the probability of candidate i given input j.
struct ProbabilisticQRF {
  int width = 0;
  std::vector<BitString> candidates;      // m distinct rows
  std::vector<std::vector<Rat>> p;        // m x n, columns sum to 1

  ProbabilisticQRF() = default;
  ProbabilisticQRF(int w, std::vector<BitString> cands, std::vector<std::vector<Rat>> table)
      : width(w), candidates(std::move(cands)), p(std::move(table)) {
    if (candidates.empty()) throw input_error("probabilistic machine needs candidates");
    std::set<BitString> seen;
    for (const auto& c : candidates) {
      if (c.width != width) throw input_error("candidate width must match machine width");
      if (!seen.insert(c).second) throw input_error("duplicate candidate: " + c.str());
    }
    if (p.size() != candidates.size())
      throw input_error("table must have one row per candidate");
    std::size_t n = p.empty() ? 0 : p[0].size();
    if (n == 0) throw input_error("table needs at least one column");
    if (static_cast<int>(n) > width)
      throw input_error("table cannot have more columns than bits");
    for (const auto& row : p) {
      if (row.size() != n) throw input_error("ragged probability table");
      for (const auto& x : row)
        if (x < 0 || x > 1) throw input_error("probability entry outside [0,1]");
    }
    Rat grand(0);
    for (std::size_t j = 0; j < n; ++j) {
      Rat col(0);
      for (std::size_t i = 0; i < p.size(); ++i) col += p[i][j];
      if (col != 1) throw input_error("column " + std::to_string(j) + " must sum to 1");
      grand += col;
    }
    // Redundancy check: normalization identity implied by column stochasticity.
    if (grand / Rat(static_cast<long long>(n)) != 1)
      throw input_error("normalization identity violated");
  }

  int columns() const { return static_cast<int>(p[0].size()); }

  std::vector<Rat> measure_distribution(int column) const {
    if (column < 0 || column >= columns()) throw input_error("column index out of range");
    std::vector<Rat> dist(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
      dist[i] = p[i][static_cast<std::size_t>(column)];
    return dist;
  }

  // Deterministic inverse-CDF sampling: one engine draw per sample, compared
  // exactly against the cumulative rational thresholds.
  std::vector<int> sample(int column, std::uint64_t seed, int count) const {
    if (count < 0) throw input_error("sample count must be nonnegative");
    auto dist = measure_distribution(column);
    std::mt19937_64 gen(seed);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    const Rat scale = rat_pow(Rat(2), 64);
    for (int s = 0; s < count; ++s) {
      Rat u = Rat(Int(gen())) / scale;  // u in [0,1)
      Rat cum(0);
      int picked = static_cast<int>(candidates.size()) - 1;
      for (std::size_t i = 0; i < dist.size(); ++i) {
        cum += dist[i];
        if (u < cum) {
          picked = static_cast<int>(i);
          break;
        }
      }
      out.push_back(picked);
    }
    return out;
  }
};

// Point-mass embedding: member pointers become candidates, the table is the
// identity, and column j concentrates on pointer j.
inline ProbabilisticQRF embed_deterministic(const CompositeQRF& q) {
  std::size_t n = q.pointers.size();
  std::vector<std::vector<Rat>> table(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) table[i][i] = Rat(1);
  return ProbabilisticQRF(q.width, q.pointers, table);
}

}  // namespace qrflow
