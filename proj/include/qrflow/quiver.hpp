#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrflow/cccd.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/ratmat.hpp"

namespace qrflow {

struct QuiverEdge {
  int src = 0, dst = 0;
  std::string label;
};

struct Quiver {
  std::vector<std::string> vertices;
  std::vector<QuiverEdge> edges;
};

// Finite-dimensional rational representation: a space per vertex, a linear
// map per edge (dst-dim x src-dim).
struct QuiverRep {
  Quiver quiver;
  std::vector<int> dims;
  std::vector<RatMat> mats;

  void validate() const {
    if (dims.size() != quiver.vertices.size()) throw input_error("one dimension per vertex required");
    for (int d : dims)
      if (d < 0) throw input_error("negative vertex dimension");
    if (mats.size() != quiver.edges.size()) throw input_error("one matrix per edge required");
    for (std::size_t e = 0; e < mats.size(); ++e) {
      const auto& ed = quiver.edges[e];
      if (ed.src < 0 || ed.src >= static_cast<int>(dims.size()) || ed.dst < 0 ||
          ed.dst >= static_cast<int>(dims.size()))
        throw input_error("edge endpoint out of range");
      if (mats[e].rows != dims[static_cast<std::size_t>(ed.dst)] ||
          mats[e].cols != dims[static_cast<std::size_t>(ed.src)])
        throw input_error("edge matrix shape mismatch on '" + ed.label + "'");
    }
  }
};

// Composite map along a path of edge indices starting at `start`; the empty
// path is the identity on the start vertex.
inline RatMat path_map(const QuiverRep& rep, int start, const std::vector<int>& path) {
  if (start < 0 || start >= static_cast<int>(rep.dims.size()))
    throw input_error("path start out of range");
  RatMat acc = RatMat::identity(rep.dims[static_cast<std::size_t>(start)]);
  int cur = start;
  for (int e : path) {
    if (e < 0 || e >= static_cast<int>(rep.quiver.edges.size()))
      throw input_error("path edge out of range");
    const auto& ed = rep.quiver.edges[static_cast<std::size_t>(e)];
    if (ed.src != cur) throw input_error("path is not chained");
    acc = mat_mul(rep.mats[static_cast<std::size_t>(e)], acc);
    cur = ed.dst;
  }
  return acc;
}

// Basis of global sections: families (gamma_v) with A_e gamma_src = gamma_dst
// for every edge. Unknowns are the concatenated vertex coordinates; the basis
// is the canonical nullspace of the stacked constraints.
struct SectionsBasis {
  std::vector<int> offsets;  // vertex -> first coordinate in the stacked vector
  RatMat basis;              // (total dim) x (section space dim)

  int count() const { return basis.cols; }

  // Component of section k at vertex v, as a column vector.
  RatMat component(int v, int k, const std::vector<int>& dims) const {
    RatMat out(dims[static_cast<std::size_t>(v)], 1);
    for (int i = 0; i < out.rows; ++i)
      out.at(i, 0) = basis.at(offsets[static_cast<std::size_t>(v)] + i, k);
    return out;
  }
};

inline SectionsBasis sections_basis(const QuiverRep& rep) {
  rep.validate();
  SectionsBasis out;
  int total = 0;
  for (int d : rep.dims) {
    out.offsets.push_back(total);
    total += d;
  }
  int n_rows = 0;
  for (const auto& e : rep.quiver.edges)
    n_rows += rep.dims[static_cast<std::size_t>(e.dst)];
  if (n_rows == 0) {
    // No constraints: every family is a section.
    out.basis = RatMat::identity(total);
    return out;
  }
  RatMat sys(n_rows, total);
  int r = 0;
  for (std::size_t e = 0; e < rep.quiver.edges.size(); ++e) {
    const auto& ed = rep.quiver.edges[e];
    int ds = rep.dims[static_cast<std::size_t>(ed.src)];
    int dt = rep.dims[static_cast<std::size_t>(ed.dst)];
    int os = out.offsets[static_cast<std::size_t>(ed.src)];
    int ot = out.offsets[static_cast<std::size_t>(ed.dst)];
    for (int i = 0; i < dt; ++i) {
      for (int j = 0; j < ds; ++j) sys.at(r + i, os + j) = rep.mats[e].at(i, j);
      sys.at(r + i, ot + i) -= 1;
    }
    r += dt;
  }
  out.basis = nullspace(std::move(sys));
  return out;
}

// The linearization of a diagram: one copy of the free vector space on the
// token set per node, and the pullback of each arrow's token map per edge.
// (L phi)(b) = phi(tokMap(b)), so entries are 0/1 with one 1 per row.
// Only commuting diagrams linearize; global_section_obstruction is the
// diagnostic for anything that fails here.
inline QuiverRep cccd_rep(const CCCDiagram& d) {
  if (!check_commutes(d).ok) throw structure_error("diagram does not commute");
  QuiverRep rep;
  for (const auto& n : d.nodes) {
    rep.quiver.vertices.push_back(n.cls.id);
    rep.dims.push_back(static_cast<int>(n.cls.tokens.size()));
  }
  for (const auto& e : d.edges) {
    rep.quiver.edges.push_back({e.src, e.dst, e.name});
    int dt = static_cast<int>(d.nodes[static_cast<std::size_t>(e.dst)].cls.tokens.size());
    int ds = static_cast<int>(d.nodes[static_cast<std::size_t>(e.src)].cls.tokens.size());
    RatMat m(dt, ds);
    for (int b = 0; b < dt; ++b) m.at(b, e.tok_map[static_cast<std::size_t>(b)]) = 1;
    rep.mats.push_back(std::move(m));
  }
  rep.validate();
  return rep;
}

// Parallel simple paths whose composite maps disagree obstruct gluing local
// sections into global ones.
struct ParallelMismatch {
  int start = -1, end = -1;
  std::vector<int> path_a, path_b;
  int difference_rank = 0;
  int agreement_dim = 0;  // nullity of (A_p - A_q): sections through here must lie in it
};

struct ObstructionReport {
  bool obstructed = false;
  std::vector<ParallelMismatch> mismatches;
};

inline ObstructionReport global_section_obstruction(const QuiverRep& rep) {
  rep.validate();
  ObstructionReport out;
  int n = static_cast<int>(rep.quiver.vertices.size());
  std::vector<std::vector<int>> out_edges(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < rep.quiver.edges.size(); ++e)
    out_edges[static_cast<std::size_t>(rep.quiver.edges[e].src)].push_back(static_cast<int>(e));

  for (int start = 0; start < n; ++start) {
    std::map<int, std::vector<std::vector<int>>> by_end;
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::vector<int> path;
    visited[static_cast<std::size_t>(start)] = true;
    std::function<void(int)> dfs = [&](int v) {
      for (int e : out_edges[static_cast<std::size_t>(v)]) {
        int w = rep.quiver.edges[static_cast<std::size_t>(e)].dst;
        if (visited[static_cast<std::size_t>(w)]) continue;
        path.push_back(e);
        by_end[w].push_back(path);
        visited[static_cast<std::size_t>(w)] = true;
        dfs(w);
        visited[static_cast<std::size_t>(w)] = false;
        path.pop_back();
      }
    };
    dfs(start);
    for (const auto& [end, paths] : by_end) {
      if (paths.size() < 2) continue;
      std::vector<RatMat> maps;
      maps.reserve(paths.size());
      for (const auto& p : paths) maps.push_back(path_map(rep, start, p));
      for (std::size_t a = 0; a + 1 < paths.size(); ++a)
        for (std::size_t b = a + 1; b < paths.size(); ++b) {
          RatMat diff = mat_sub(maps[a], maps[b]);
          int rank = mat_rank(diff);
          if (rank == 0) continue;
          ParallelMismatch pm;
          pm.start = start;
          pm.end = end;
          pm.path_a = paths[a];
          pm.path_b = paths[b];
          pm.difference_rank = rank;
          pm.agreement_dim = diff.cols - rank;
          out.mismatches.push_back(std::move(pm));
        }
    }
  }
  out.obstructed = !out.mismatches.empty();
  return out;
}

// ---- Contextuality ----

struct ContextReport {
  int dimension = 0;            // minimum base removals restoring co-deployability
  std::vector<int> removed;     // node indices into y, lexicographically first witness
  bool empty_survivor = false;  // the witness removed every base of y
};

// Minimum number of base classifiers of y whose removal makes x and the
// restricted y co-deployable. Exhaustive by increasing size, lexicographic
// within a size, so the reported witness is canonical.
inline ContextReport contextuality_dimension(const CCCDiagram& x, const CCCDiagram& y) {
  auto bases = y.nodes_with_role(Role::Base);
  int n = static_cast<int>(bases.size());
  if (n > 20) throw input_error("base count too large for exhaustive search");

  for (int r = 0; r <= n; ++r) {
    // r-subsets of bases in lexicographic order.
    std::vector<int> pick(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::vector<int> removed;
      removed.reserve(static_cast<std::size_t>(r));
      for (int i : pick) removed.push_back(bases[static_cast<std::size_t>(i)]);
      CCCDiagram restricted = restrict_without(y, removed);
      if (co_deployable(x, restricted).ok) {
        ContextReport rep;
        rep.dimension = r;
        rep.removed = removed;
        rep.empty_survivor = (r == n);
        return rep;
      }
      // Advance to the next combination.
      int i = r - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - r + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < r; ++j)
        pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  throw structure_error("no removal set restores co-deployability");
}

// dimension(y given x) / dimension(y), with dimension(y) = its base count.
inline Rat contextual_fraction(const CCCDiagram& x, const CCCDiagram& y) {
  int n = static_cast<int>(y.nodes_with_role(Role::Base).size());
  if (n == 0) throw domain_error("degenerate diagram: no base classifiers");
  return Rat(contextuality_dimension(x, y).dimension, n);
}

}  // namespace qrflow
