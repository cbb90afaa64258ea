#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qrflow/bitstring.hpp"
#include "qrflow/classifier.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/parallel.hpp"
#include "qrflow/qrf.hpp"

namespace qrflow {

enum class Role { Base, ComponentCore, TopCore };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::Base: return "base";
    case Role::ComponentCore: return "component-core";
    case Role::TopCore: return "top-core";
  }
  return "?";
}

struct DiagNode {
  Classifier cls;
  Role role = Role::Base;
  int position = -1;  // bit position (bases only)
  int group = -1;     // sub-core a base feeds / index of a component core
};

// Raw arrow data. Validity (adjointness) is checked by functions, not the
// constructor, so fixtures may hold would-be diagrams that fail the checks.
struct DiagEdge {
  int src = 0, dst = 0;
  std::vector<int> tok_map;  // dst token -> src token
  std::vector<int> typ_map;  // src type -> dst type
  bool cone = false;         // dual (core -> base) arrow
  std::string name;
};

struct CoreGroup {
  int pointer = 0;             // index into pointers
  std::vector<int> positions;  // bit positions this sub-core conjoins
};

struct CCCDiagram {
  int width = 0;
  std::vector<DiagNode> nodes;
  std::vector<DiagEdge> edges;
  // Builder metadata; absent (empty) on hand-shaped diagrams.
  std::vector<BitString> pointers;
  std::vector<CoreGroup> groups;
  std::vector<std::uint32_t> frame;  // token bijection; empty = identity

  std::uint32_t framed(std::uint32_t token) const {
    return frame.empty() ? token : frame[token];
  }

  int node_by_id(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].cls.id == id) return static_cast<int>(i);
    return -1;
  }

  std::vector<int> nodes_with_role(Role r) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].role == r) out.push_back(static_cast<int>(i));
    return out;
  }

  // Index of the unique top core, or -1 if the count differs from one.
  int top_core() const {
    auto tops = nodes_with_role(Role::TopCore);
    return tops.size() == 1 ? tops[0] : -1;
  }
};

inline std::vector<std::string> all_token_labels(int width) {
  std::vector<std::string> out;
  out.reserve(token_count(width));
  for (std::uint32_t t = 0; t < token_count(width); ++t)
    out.push_back(BitString(width, t).str());
  return out;
}

// Suffix bijection lifted to the full register: prefix bits fixed, the
// trailing (width - prefix_len) bits permuted by rho.
inline std::vector<std::uint32_t> lift_suffix_perm(int width, int prefix_len,
                                                   const std::vector<std::uint32_t>& rho) {
  int suffix = width - prefix_len;
  if (prefix_len < 0 || suffix < 1) throw input_error("prefix length out of range");
  if (rho.size() != token_count(suffix) || !is_permutation_table(rho))
    throw input_error("suffix map must be a bijection on the suffix block");
  std::vector<std::uint32_t> out(token_count(width));
  for (std::uint32_t x = 0; x < out.size(); ++x) {
    std::uint32_t hi = x >> suffix;
    std::uint32_t lo = x & (token_count(suffix) - 1u);
    out[x] = (hi << suffix) | rho[lo];
  }
  return out;
}

inline std::vector<std::uint32_t> compose_perms(const std::vector<std::uint32_t>& first,
                                                const std::vector<std::uint32_t>& then) {
  if (first.size() != then.size()) throw input_error("permutation size mismatch");
  std::vector<std::uint32_t> out(first.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = then[first[i]];
  return out;
}

namespace detail {

inline int bit_of(int width, std::uint32_t token, int pos) {
  return BitString(width, token).get(pos);
}

// Column of "position pos agrees with pointer e in frame coordinates".
inline std::vector<bool> position_column(int width, const std::vector<std::uint32_t>& frame,
                                         const BitString& e, int pos) {
  std::vector<bool> col(token_count(width));
  std::uint32_t fe = frame.empty() ? e.index() : frame[e.index()];
  int target = bit_of(width, fe, pos);
  for (std::uint32_t x = 0; x < col.size(); ++x) {
    std::uint32_t fx = frame.empty() ? x : frame[x];
    col[x] = bit_of(width, fx, pos) == target;
  }
  return col;
}

// First token satisfying every listed column, or -1.
inline int first_token_where(const std::vector<std::vector<bool>>& cols, bool value, int width) {
  for (std::uint32_t x = 0; x < token_count(width); ++x) {
    bool ok = true;
    for (const auto& c : cols)
      if (c[x] != value) { ok = false; break; }
    if (ok) return static_cast<int>(x);
  }
  return -1;
}

}  // namespace detail

// Shared constructor for canonical diagrams. Every base/core column derives
// from the rule "position i agrees with its component pointer in frame
// coordinates", so rotations compose by updating the frame only.
// separate_top = false collapses the single sub-core with the top core.
inline CCCDiagram build_diagram(int width, std::vector<BitString> pointers,
                                std::vector<CoreGroup> groups,
                                std::vector<std::uint32_t> frame, bool separate_top) {
  if (width < 1 || width > 16) throw input_error("diagram width out of range [1,16]");
  if (pointers.empty()) throw input_error("at least one pointer required");
  if (static_cast<int>(pointers.size()) > width)
    throw input_error("more pointers than bit positions");
  {
    std::set<BitString> seen;
    for (const auto& p : pointers) {
      if (p.width != width) throw input_error("pointer width mismatch");
      if (!seen.insert(p).second) throw input_error("duplicate pointer: " + p.str());
    }
  }
  if (!frame.empty() && (frame.size() != token_count(width) || !is_permutation_table(frame)))
    throw input_error("frame must be a token bijection");
  if (groups.empty()) throw input_error("at least one core group required");
  for (const auto& g : groups) {
    if (g.pointer < 0 || g.pointer >= static_cast<int>(pointers.size()))
      throw input_error("group pointer index out of range");
    if (g.positions.empty()) throw input_error("empty core group");
    for (int p : g.positions)
      if (p < 0 || p >= width) throw input_error("group position out of range");
  }
  if (!separate_top && groups.size() != 1)
    throw input_error("merged top requires a single group");

  bool multi = pointers.size() > 1;
  auto tokens = all_token_labels(width);
  CCCDiagram d;
  d.width = width;
  d.pointers = pointers;
  d.groups = groups;
  d.frame = frame;

  auto base_id = [&](int j, int i) {
    return multi ? "base.c" + std::to_string(j) + ".p" + std::to_string(i)
                 : "base.p" + std::to_string(i);
  };
  auto tau_label = [&](int j, int i) {
    return multi ? "tau.c" + std::to_string(j) + ".p" + std::to_string(i)
                 : "tau.p" + std::to_string(i);
  };
  auto group_core_id = [&](int g) {
    if (multi) return "core.c" + std::to_string(groups[static_cast<std::size_t>(g)].pointer);
    return separate_top ? "core.b" + std::to_string(g) : std::string("core");
  };
  auto group_pi_label = [&](int g) {
    if (multi) return "pi.c" + std::to_string(groups[static_cast<std::size_t>(g)].pointer);
    return separate_top ? "pi.b" + std::to_string(g) : std::string("pi");
  };

  // Per-group base columns, used for cores and witness search.
  std::vector<std::vector<std::vector<bool>>> gcols(groups.size());
  std::vector<std::vector<bool>> all_base_cols;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& e = pointers[static_cast<std::size_t>(groups[g].pointer)];
    for (int pos : groups[g].positions) {
      auto col = detail::position_column(width, frame, e, pos);
      gcols[g].push_back(col);
      all_base_cols.push_back(col);
    }
  }

  // Base nodes.
  std::vector<std::vector<int>> base_node(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int j = groups[g].pointer;
    for (std::size_t k = 0; k < groups[g].positions.size(); ++k) {
      int pos = groups[g].positions[k];
      std::vector<std::vector<bool>> rel(token_count(width), std::vector<bool>(1));
      for (std::uint32_t x = 0; x < token_count(width); ++x) rel[x][0] = gcols[g][k][x];
      DiagNode n;
      n.cls = Classifier(base_id(j, pos), tokens, {tau_label(j, pos)}, rel);
      n.role = Role::Base;
      n.position = pos;
      n.group = static_cast<int>(g);
      base_node[g].push_back(static_cast<int>(d.nodes.size()));
      d.nodes.push_back(std::move(n));
    }
  }

  // Group cores: pass-through taus plus the block conjunction.
  std::vector<int> core_node(groups.size());
  std::vector<std::vector<bool>> group_conj(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int j = groups[g].pointer;
    std::vector<std::string> types;
    std::vector<std::vector<bool>> cols;
    for (std::size_t k = 0; k < groups[g].positions.size(); ++k) {
      types.push_back(tau_label(j, groups[g].positions[k]));
      cols.push_back(gcols[g][k]);
    }
    std::vector<bool> conj(token_count(width), true);
    for (const auto& c : cols)
      for (std::uint32_t x = 0; x < conj.size(); ++x) conj[x] = conj[x] && c[x];
    group_conj[g] = conj;
    types.push_back(group_pi_label(static_cast<int>(g)));
    cols.push_back(conj);
    std::vector<std::vector<bool>> rel(token_count(width), std::vector<bool>(types.size()));
    for (std::uint32_t x = 0; x < token_count(width); ++x)
      for (std::size_t a = 0; a < cols.size(); ++a) rel[x][a] = cols[a][x];
    DiagNode n;
    n.cls = Classifier(group_core_id(static_cast<int>(g)), tokens, types, rel);
    n.role = separate_top ? Role::ComponentCore : Role::TopCore;
    n.group = static_cast<int>(g);
    core_node[g] = static_cast<int>(d.nodes.size());
    d.nodes.push_back(std::move(n));
  }

  // Top core: pass-throughs, group conjunctions, and the top classification
  // column (disjunction over pointers when multi, full conjunction otherwise).
  int top_node = -1;
  if (separate_top) {
    std::vector<std::string> types;
    std::vector<std::vector<bool>> cols;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      int j = groups[g].pointer;
      for (std::size_t k = 0; k < groups[g].positions.size(); ++k) {
        types.push_back(tau_label(j, groups[g].positions[k]));
        cols.push_back(gcols[g][k]);
      }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      types.push_back(group_pi_label(static_cast<int>(g)));
      cols.push_back(group_conj[g]);
    }
    std::vector<bool> topcol(token_count(width), false);
    if (multi) {
      for (const auto& e : pointers) topcol[e.index()] = true;
      types.push_back("sigma");
    } else {
      for (std::uint32_t x = 0; x < topcol.size(); ++x) {
        bool all = true;
        for (std::size_t g = 0; g < groups.size(); ++g) all = all && group_conj[g][x];
        topcol[x] = all;
      }
      types.push_back("pi");
    }
    cols.push_back(topcol);
    std::vector<std::vector<bool>> rel(token_count(width), std::vector<bool>(types.size()));
    for (std::uint32_t x = 0; x < token_count(width); ++x)
      for (std::size_t a = 0; a < cols.size(); ++a) rel[x][a] = cols[a][x];
    DiagNode n;
    n.cls = Classifier("core.top", tokens, types, rel);
    n.role = Role::TopCore;
    top_node = static_cast<int>(d.nodes.size());
    d.nodes.push_back(std::move(n));
  }

  auto id_tok = [&] {
    std::vector<int> v(token_count(width));
    for (std::uint32_t x = 0; x < token_count(width); ++x) v[x] = static_cast<int>(x);
    return v;
  };

  // Cocone arrows: base -> its group core.
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int j = groups[g].pointer;
    for (std::size_t k = 0; k < groups[g].positions.size(); ++k) {
      int pos = groups[g].positions[k];
      DiagEdge e;
      e.src = base_node[g][k];
      e.dst = core_node[g];
      e.tok_map = id_tok();
      e.typ_map = {static_cast<int>(k)};  // tau slot in the group core
      e.name = multi ? "f.c" + std::to_string(j) + ".p" + std::to_string(pos)
                     : "f.p" + std::to_string(pos);
      d.edges.push_back(std::move(e));
    }
  }

  // Cocone arrows: group core -> top (pass-through).
  if (separate_top) {
    int tau_total = 0;
    for (const auto& g : groups) tau_total += static_cast<int>(g.positions.size());
    int tau_offset = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      int ntau = static_cast<int>(groups[g].positions.size());
      DiagEdge e;
      e.src = core_node[g];
      e.dst = top_node;
      e.tok_map = id_tok();
      e.typ_map.resize(static_cast<std::size_t>(ntau) + 1);
      for (int k = 0; k < ntau; ++k) e.typ_map[static_cast<std::size_t>(k)] = tau_offset + k;
      e.typ_map[static_cast<std::size_t>(ntau)] = tau_total + static_cast<int>(g);
      e.name = multi ? "psi.c" + std::to_string(groups[g].pointer)
                     : "psi.b" + std::to_string(g);
      tau_offset += ntau;
      d.edges.push_back(std::move(e));
    }
  }

  // Cone arrows. A single-type base forces the type map to collapse; the
  // token map is then fixed by adjointness up to the witness pair. Witnesses
  // are canonical: the pointer on the satisfying side, the first token
  // failing every base column of the scope on the failing side. Group cones
  // across a single component share the diagram-global failing witness so
  // that all cone compositions agree.
  int global_fail = detail::first_token_where(all_base_cols, false, width);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int j = groups[g].pointer;
    int sat = static_cast<int>(pointers[static_cast<std::size_t>(j)].index());
    int fail = multi ? detail::first_token_where(gcols[g], false, width) : global_fail;
    if (fail < 0) continue;  // no failing witness: omit the cones
    int core_types = static_cast<int>(d.nodes[static_cast<std::size_t>(core_node[g])].cls.types.size());
    for (std::size_t k = 0; k < groups[g].positions.size(); ++k) {
      int pos = groups[g].positions[k];
      DiagEdge e;
      e.src = core_node[g];
      e.dst = base_node[g][k];
      e.cone = true;
      e.typ_map.assign(static_cast<std::size_t>(core_types), 0);
      e.tok_map.resize(token_count(width));
      for (std::uint32_t x = 0; x < token_count(width); ++x)
        e.tok_map[x] = gcols[g][k][x] ? sat : fail;
      e.name = multi ? "h.c" + std::to_string(j) + ".p" + std::to_string(pos)
                     : "h.p" + std::to_string(pos);
      d.edges.push_back(std::move(e));
    }
  }
  if (separate_top && !multi && global_fail >= 0) {
    // Top cones target the block cores; legs to bases factor through the
    // block cones, which keeps parallel paths unique. A leg exists exactly
    // when a token satisfying all top types exists, i.e. in the
    // single-component case (the pointer itself).
    int sat = static_cast<int>(pointers[0].index());
    int top_types = static_cast<int>(d.nodes[static_cast<std::size_t>(top_node)].cls.types.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      DiagEdge e;
      e.src = top_node;
      e.dst = core_node[g];
      e.cone = true;
      e.typ_map.assign(static_cast<std::size_t>(top_types),
                       static_cast<int>(groups[g].positions.size()));
      e.tok_map.resize(token_count(width));
      for (std::uint32_t x = 0; x < token_count(width); ++x)
        e.tok_map[x] = group_conj[g][x] ? sat : global_fail;
      e.name = "h.top.b" + std::to_string(g);
      d.edges.push_back(std::move(e));
    }
  }

  return d;
}

// m single-bit testers feeding one conjunction core.
inline CCCDiagram build_elementary(int width, const BitString& pointer) {
  CoreGroup g;
  g.pointer = 0;
  for (int i = 0; i < width; ++i) g.positions.push_back(i);
  return build_diagram(width, {pointer}, {g}, {}, /*separate_top=*/false);
}

// One base row and conjunction core per pointer, one disjunction top core.
inline CCCDiagram build_composite(int width, const std::vector<BitString>& pointers) {
  std::vector<CoreGroup> groups;
  for (std::size_t j = 0; j < pointers.size(); ++j) {
    CoreGroup g;
    g.pointer = static_cast<int>(j);
    for (int i = 0; i < width; ++i) g.positions.push_back(i);
    groups.push_back(std::move(g));
  }
  return build_diagram(width, pointers, groups, {}, /*separate_top=*/true);
}

// ---- Structural checks ----

struct EdgeCheck {
  int edge = -1;
  InfomorphismReport report;
};

struct CommuteWitness {
  std::vector<int> path_a, path_b;  // edge index sequences
  std::string side;                 // "token" or "type"
  int at = -1;                      // first differing input index
  int lhs = -1, rhs = -1;
};

struct CommuteReport {
  bool ok = true;
  std::optional<CommuteWitness> witness;
};

struct PathTables {
  std::vector<int> tok;  // Tok(end) -> Tok(start)
  std::vector<int> typ;  // Typ(start) -> Typ(end)
};

inline PathTables compose_path(const CCCDiagram& d, const std::vector<int>& path) {
  if (path.empty()) throw input_error("empty path");
  PathTables t;
  t.tok = d.edges[static_cast<std::size_t>(path[0])].tok_map;
  t.typ = d.edges[static_cast<std::size_t>(path[0])].typ_map;
  for (std::size_t s = 1; s < path.size(); ++s) {
    const auto& e = d.edges[static_cast<std::size_t>(path[s])];
    std::vector<int> tok(e.tok_map.size());
    for (std::size_t c = 0; c < tok.size(); ++c)
      tok[c] = t.tok[static_cast<std::size_t>(e.tok_map[c])];
    std::vector<int> typ(t.typ.size());
    for (std::size_t a = 0; a < typ.size(); ++a)
      typ[a] = e.typ_map[static_cast<std::size_t>(t.typ[a])];
    t.tok = std::move(tok);
    t.typ = std::move(typ);
  }
  return t;
}

namespace detail {

// All simple directed paths from start, grouped by end node, in lexicographic
// edge-sequence order (DFS over ascending edge indices).
inline void enumerate_paths(const CCCDiagram& d, int start,
                            std::map<int, std::vector<std::vector<int>>>& by_end) {
  std::vector<std::vector<int>> out_edges(d.nodes.size());
  for (std::size_t e = 0; e < d.edges.size(); ++e)
    out_edges[static_cast<std::size_t>(d.edges[e].src)].push_back(static_cast<int>(e));
  std::vector<bool> visited(d.nodes.size(), false);
  std::vector<int> path;
  visited[static_cast<std::size_t>(start)] = true;
  std::size_t emitted = 0;

  std::function<void(int)> dfs = [&](int v) {
    for (int e : out_edges[static_cast<std::size_t>(v)]) {
      int w = d.edges[static_cast<std::size_t>(e)].dst;
      if (visited[static_cast<std::size_t>(w)]) continue;
      path.push_back(e);
      by_end[w].push_back(path);
      if (++emitted > 1000000) throw structure_error("path enumeration limit exceeded");
      visited[static_cast<std::size_t>(w)] = true;
      dfs(w);
      visited[static_cast<std::size_t>(w)] = false;
      path.pop_back();
    }
  };
  dfs(start);
}

}  // namespace detail

// A diagram commutes iff every pair of simple directed paths with common
// endpoints composes to the same token-map and type-map tables. The witness
// is the first failing pair in (start, end, lexicographic path) order.
inline CommuteReport check_commutes(const CCCDiagram& d) {
  auto per_start = parallel_map<CommuteReport>(d.nodes.size(), [&](std::size_t u) {
    CommuteReport rep;
    std::map<int, std::vector<std::vector<int>>> by_end;
    detail::enumerate_paths(d, static_cast<int>(u), by_end);
    for (const auto& [end, paths] : by_end) {
      if (paths.size() < 2) continue;
      std::vector<PathTables> tabs;
      tabs.reserve(paths.size());
      for (const auto& p : paths) tabs.push_back(compose_path(d, p));
      for (std::size_t a = 0; a + 1 < paths.size() && rep.ok; ++a) {
        for (std::size_t b = a + 1; b < paths.size() && rep.ok; ++b) {
          for (std::size_t i = 0; i < tabs[a].tok.size(); ++i) {
            if (tabs[a].tok[i] != tabs[b].tok[i]) {
              rep.ok = false;
              rep.witness = CommuteWitness{paths[a], paths[b], "token", static_cast<int>(i),
                                           tabs[a].tok[i], tabs[b].tok[i]};
              break;
            }
          }
          if (!rep.ok) break;
          for (std::size_t i = 0; i < tabs[a].typ.size(); ++i) {
            if (tabs[a].typ[i] != tabs[b].typ[i]) {
              rep.ok = false;
              rep.witness = CommuteWitness{paths[a], paths[b], "type", static_cast<int>(i),
                                           tabs[a].typ[i], tabs[b].typ[i]};
              break;
            }
          }
        }
      }
      if (!rep.ok) break;
    }
    return rep;
  });
  for (const auto& rep : per_start)
    if (!rep.ok) return rep;
  return {};
}

struct DiagramCheck {
  bool shape_ok = true;
  std::string shape_message;
  std::vector<EdgeCheck> bad_edges;
  CommuteReport commute;
  bool ok = false;
};

inline bool diagram_shape_ok(const CCCDiagram& d, std::string* message = nullptr) {
  auto fail = [&](const std::string& m) {
    if (message) *message = m;
    return false;
  };
  if (d.nodes.empty()) return fail("diagram has no nodes");
  if (d.nodes_with_role(Role::TopCore).size() != 1)
    return fail("diagram must have exactly one top core");
  for (const auto& e : d.edges) {
    if (e.src < 0 || e.src >= static_cast<int>(d.nodes.size()) || e.dst < 0 ||
        e.dst >= static_cast<int>(d.nodes.size()))
      return fail("edge endpoint out of range");
    const auto& s = d.nodes[static_cast<std::size_t>(e.src)].cls;
    const auto& t = d.nodes[static_cast<std::size_t>(e.dst)].cls;
    if (e.tok_map.size() != t.tokens.size()) return fail("edge token map not total");
    if (e.typ_map.size() != s.types.size()) return fail("edge type map not total");
  }
  return true;
}

// Full verdict: shape, per-edge adjointness, commutativity.
inline DiagramCheck validate_diagram(const CCCDiagram& d) {
  DiagramCheck out;
  out.shape_ok = diagram_shape_ok(d, &out.shape_message);
  if (!out.shape_ok) {
    out.ok = false;
    return out;
  }
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    const auto& ed = d.edges[e];
    auto rep = validate_infomorphism(d.nodes[static_cast<std::size_t>(ed.src)].cls,
                                     d.nodes[static_cast<std::size_t>(ed.dst)].cls,
                                     ed.tok_map, ed.typ_map);
    if (!rep.ok) out.bad_edges.push_back({static_cast<int>(e), std::move(rep)});
  }
  out.commute = check_commutes(d);
  out.ok = out.bad_edges.empty() && out.commute.ok;
  return out;
}

// ---- Read-back ----

// Pointers are read off the cores' conjunction columns and reported in
// frame coordinates. A core whose bases span every position determines its
// own pointer; cores over partial position blocks jointly determine one
// pointer by intersecting their conjunctions (the fission picture). A core
// without direct base arrows (a disjunction apex) carries no pointer data.
inline CompositeQRF cccd_to_qrf(const CCCDiagram& d) {
  if (!diagram_shape_ok(d)) throw structure_error("not a well-shaped diagram");
  std::vector<BitString> out;
  std::vector<bool> block_conj;
  bool any_block = false;
  for (std::size_t c = 0; c < d.nodes.size(); ++c) {
    if (d.nodes[c].role == Role::Base) continue;
    const auto& core = d.nodes[c].cls;
    std::vector<bool> conj(core.tokens.size(), true);
    std::set<int> positions;
    bool has_base = false;
    for (const auto& e : d.edges) {
      if (e.cone || e.dst != static_cast<int>(c)) continue;
      const auto& src = d.nodes[static_cast<std::size_t>(e.src)];
      if (src.role != Role::Base) continue;
      if (src.cls.types.size() != 1)
        throw structure_error("base classifier must carry a single type");
      has_base = true;
      positions.insert(src.position);
      auto col = src.cls.column(0);
      for (std::size_t x = 0; x < conj.size(); ++x) conj[x] = conj[x] && col[x];
    }
    if (!has_base) continue;
    int found = -1;
    for (std::size_t a = 0; a < core.types.size(); ++a)
      if (core.column(static_cast<int>(a)) == conj) { found = static_cast<int>(a); break; }
    if (found < 0)
      throw structure_error("core '" + core.id + "' is not conjunctive over its base columns");
    if (static_cast<int>(positions.size()) == d.width) {
      int sat = -1;
      for (std::size_t x = 0; x < conj.size(); ++x) {
        if (!conj[x]) continue;
        if (sat >= 0)
          throw structure_error("core '" + core.id + "' conjunction does not determine a unique pointer");
        sat = static_cast<int>(x);
      }
      if (sat < 0) throw structure_error("core '" + core.id + "' conjunction is unsatisfiable");
      out.push_back(BitString(d.width, d.framed(static_cast<std::uint32_t>(sat))));
    } else {
      if (!any_block) block_conj.assign(conj.size(), true);
      any_block = true;
      for (std::size_t x = 0; x < conj.size(); ++x)
        block_conj[x] = block_conj[x] && conj[x];
    }
  }
  if (any_block) {
    int sat = -1;
    for (std::size_t x = 0; x < block_conj.size(); ++x) {
      if (!block_conj[x]) continue;
      if (sat >= 0)
        throw structure_error("block conjunction does not determine a unique pointer");
      sat = static_cast<int>(x);
    }
    if (sat < 0) throw structure_error("block conjunction is unsatisfiable");
    out.push_back(BitString(d.width, d.framed(static_cast<std::uint32_t>(sat))));
  }
  if (out.empty()) throw structure_error("no core carries pointer data");
  return CompositeQRF(d.width, out);
}

// ---- Morphisms ----

enum class MorKind { Identity, Fission, Fusion, Rotation, Composite };

inline const char* morkind_name(MorKind k) {
  switch (k) {
    case MorKind::Identity: return "identity";
    case MorKind::Fission: return "fission";
    case MorKind::Fusion: return "fusion";
    case MorKind::Rotation: return "rotation";
    case MorKind::Composite: return "composite";
  }
  return "?";
}

struct DiagramMorphism {
  CCCDiagram source, target;
  std::vector<int> node_map;               // source node -> target node
  std::vector<std::vector<int>> edge_map;  // source edge -> path of target edges
  MorKind kind = MorKind::Identity;
  int split = -1;                          // fission/fusion: prefix block length
  int rot_prefix = -1;                     // rotation: unchanged prefix length
  std::vector<std::uint32_t> rot;          // rotation: suffix bijection
  std::vector<DiagramMorphism> parts;      // composite chain, in order
};

// Incidence preservation: every source edge maps to a chained target path
// between the images of its endpoints.
inline void check_morphism(const DiagramMorphism& m) {
  if (m.node_map.size() != m.source.nodes.size())
    throw structure_error("node map must be total");
  for (int v : m.node_map)
    if (v < 0 || v >= static_cast<int>(m.target.nodes.size()))
      throw structure_error("node map image out of range");
  if (m.edge_map.size() != m.source.edges.size())
    throw structure_error("edge map must be total");
  for (std::size_t e = 0; e < m.edge_map.size(); ++e) {
    // An empty path is the identity at the shared image node; the endpoint
    // check below enforces that the endpoints actually coincide then.
    const auto& path = m.edge_map[e];
    int want_src = m.node_map[static_cast<std::size_t>(m.source.edges[e].src)];
    int want_dst = m.node_map[static_cast<std::size_t>(m.source.edges[e].dst)];
    int cur = want_src;
    for (int te : path) {
      if (te < 0 || te >= static_cast<int>(m.target.edges.size()))
        throw structure_error("edge image index out of range");
      if (m.target.edges[static_cast<std::size_t>(te)].src != cur)
        throw structure_error("edge image path is not chained");
      cur = m.target.edges[static_cast<std::size_t>(te)].dst;
    }
    if (cur != want_dst) throw structure_error("edge image path misses the mapped endpoint");
  }
}

inline bool diagrams_equal(const CCCDiagram& a, const CCCDiagram& b) {
  if (a.width != b.width || a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size())
    return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (!(a.nodes[i].cls == b.nodes[i].cls) || a.nodes[i].role != b.nodes[i].role ||
        a.nodes[i].position != b.nodes[i].position || a.nodes[i].group != b.nodes[i].group)
      return false;
  }
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const auto& x = a.edges[i];
    const auto& y = b.edges[i];
    if (x.src != y.src || x.dst != y.dst || x.tok_map != y.tok_map || x.typ_map != y.typ_map ||
        x.cone != y.cone || x.name != y.name)
      return false;
  }
  return true;
}

inline DiagramMorphism identity_morphism(const CCCDiagram& d) {
  DiagramMorphism m;
  m.source = d;
  m.target = d;
  m.node_map.resize(d.nodes.size());
  for (std::size_t i = 0; i < d.nodes.size(); ++i) m.node_map[i] = static_cast<int>(i);
  m.edge_map.resize(d.edges.size());
  for (std::size_t e = 0; e < d.edges.size(); ++e) m.edge_map[e] = {static_cast<int>(e)};
  m.kind = MorKind::Identity;
  check_morphism(m);
  return m;
}

inline DiagramMorphism compose_morphisms(const DiagramMorphism& first,
                                         const DiagramMorphism& second) {
  if (!diagrams_equal(first.target, second.source))
    throw structure_error("morphism composition endpoint mismatch");
  DiagramMorphism m;
  m.source = first.source;
  m.target = second.target;
  m.node_map.resize(first.node_map.size());
  for (std::size_t i = 0; i < m.node_map.size(); ++i)
    m.node_map[i] = second.node_map[static_cast<std::size_t>(first.node_map[i])];
  m.edge_map.resize(first.edge_map.size());
  for (std::size_t e = 0; e < m.edge_map.size(); ++e) {
    for (int mid : first.edge_map[e]) {
      const auto& tail = second.edge_map[static_cast<std::size_t>(mid)];
      m.edge_map[e].insert(m.edge_map[e].end(), tail.begin(), tail.end());
    }
  }
  m.kind = MorKind::Composite;
  m.parts = {first, second};
  check_morphism(m);
  return m;
}

// The token relabeling a morphism induces on register basis states: identity
// for fission/fusion, the lifted suffix bijection for rotations.
inline std::vector<std::uint32_t> state_map(const DiagramMorphism& m) {
  if (m.source.width != m.target.width)
    throw input_error("state map undefined across widths");
  switch (m.kind) {
    case MorKind::Identity:
    case MorKind::Fission:
    case MorKind::Fusion:
      return identity_perm(m.source.width);
    case MorKind::Rotation:
      return lift_suffix_perm(m.source.width, m.rot_prefix, m.rot);
    case MorKind::Composite: {
      auto acc = identity_perm(m.source.width);
      for (const auto& p : m.parts) acc = compose_perms(acc, state_map(p));
      return acc;
    }
  }
  throw input_error("unknown morphism kind");
}

namespace detail {

// Matches the nodes of two builder-generated diagrams by classifier id.
inline std::vector<int> match_nodes_by_id(const CCCDiagram& src, const CCCDiagram& dst) {
  std::vector<int> map(src.nodes.size(), -1);
  for (std::size_t i = 0; i < src.nodes.size(); ++i) {
    int j = dst.node_by_id(src.nodes[i].cls.id);
    if (j < 0) throw structure_error("no matching node for '" + src.nodes[i].cls.id + "'");
    map[i] = j;
  }
  return map;
}

inline int edge_by_name(const CCCDiagram& d, const std::string& name) {
  for (std::size_t e = 0; e < d.edges.size(); ++e)
    if (d.edges[e].name == name) return static_cast<int>(e);
  throw structure_error("no edge named '" + name + "'");
}

inline void require_single_component(const CCCDiagram& d, const char* op) {
  if (d.pointers.size() != 1 || d.groups.empty())
    throw input_error(std::string(op) + " requires a single-component builder diagram");
}

}  // namespace detail

// Splits a single-core diagram at prefix length `split` into two sub-cores
// feeding a fresh top core. Classification is unchanged.
inline DiagramMorphism fission(const CCCDiagram& d, int split) {
  detail::require_single_component(d, "fission");
  if (d.groups.size() != 1)
    throw input_error("fission requires an unsplit diagram");
  if (split < 1 || split >= d.width) throw input_error("split must satisfy 1 <= split < width");
  const auto& positions = d.groups[0].positions;
  CoreGroup g1, g2;
  g1.pointer = g2.pointer = 0;
  for (int p : positions) (p < split ? g1 : g2).positions.push_back(p);
  if (g1.positions.empty() || g2.positions.empty())
    throw input_error("split does not separate the position block");
  DiagramMorphism m;
  m.source = d;
  m.target = build_diagram(d.width, d.pointers, {g1, g2}, d.frame, /*separate_top=*/true);
  m.kind = MorKind::Fission;
  m.split = split;
  // Bases keep their ids; the merged core maps onto the new top.
  m.node_map.assign(d.nodes.size(), -1);
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const auto& n = d.nodes[i];
    m.node_map[i] = (n.role == Role::Base)
                        ? m.target.node_by_id(n.cls.id)
                        : m.target.node_by_id("core.top");
    if (m.node_map[i] < 0) throw structure_error("fission node matching failed");
  }
  m.edge_map.assign(d.edges.size(), {});
  for (std::size_t e = 0; e < d.edges.size(); ++e) {
    const auto& ed = d.edges[e];
    int pos = d.nodes[static_cast<std::size_t>(ed.cone ? ed.dst : ed.src)].position;
    int block = pos < split ? 0 : 1;
    if (!ed.cone) {
      m.edge_map[e] = {detail::edge_by_name(m.target, "f.p" + std::to_string(pos)),
                       detail::edge_by_name(m.target, "psi.b" + std::to_string(block))};
    } else {
      m.edge_map[e] = {detail::edge_by_name(m.target, "h.top.b" + std::to_string(block)),
                       detail::edge_by_name(m.target, "h.p" + std::to_string(pos))};
    }
  }
  check_morphism(m);
  return m;
}

// The standalone sub-diagrams of a split diagram: block bases plus the block
// core, re-rooted as a top core over its positions.
inline std::vector<CCCDiagram> extract_components(const CCCDiagram& d) {
  detail::require_single_component(d, "component extraction");
  std::vector<CCCDiagram> out;
  for (std::size_t g = 0; g < d.groups.size(); ++g) {
    CCCDiagram c = build_diagram(d.width, d.pointers, {d.groups[g]}, d.frame,
                                 /*separate_top=*/false);
    // Preserve the block identity in ids so fusion can reassemble them.
    int core = c.node_by_id("core");
    c.nodes[static_cast<std::size_t>(core)].cls.id = "core.b" + std::to_string(g);
    out.push_back(std::move(c));
  }
  return out;
}

// Joins two single-core diagrams into the merged single-core machine over
// the union, so that fission and fusion are strict inverses on objects and
// the functor image of fusion ends at the single-sector boundary. The
// morphism runs from the canonical split-form diagram over the two blocks
// (the same object fission produces) to the merged machine. Equal widths
// with disjoint position blocks join in place; two full-width machines
// concatenate into a wider register. Anything else is rejected.
inline DiagramMorphism fuse(const CCCDiagram& s1, const CCCDiagram& s2) {
  detail::require_single_component(s1, "fusion");
  detail::require_single_component(s2, "fusion");
  if (s1.groups.size() != 1 || s2.groups.size() != 1)
    throw input_error("fusion takes single-core diagrams");
  const auto& p1 = s1.groups[0].positions;
  const auto& p2 = s2.groups[0].positions;
  bool full1 = static_cast<int>(p1.size()) == s1.width;
  bool full2 = static_cast<int>(p2.size()) == s2.width;

  std::set<int> set1(p1.begin(), p1.end()), set2(p2.begin(), p2.end());
  bool overlap = false;
  for (int p : p2) overlap = overlap || set1.count(p) > 0;

  // Fused register data: width, pointer, frame, and the two block groups.
  int w = 0;
  BitString e(1, 0);
  std::vector<std::uint32_t> frame;
  CoreGroup b1, b2;
  b1.pointer = b2.pointer = 0;
  if (s1.width == s2.width && !overlap) {
    // In place: both diagrams describe blocks of the same register.
    if (s1.frame != s2.frame) throw input_error("fusion requires matching frames");
    std::set<int> all(set1);
    all.insert(set2.begin(), set2.end());
    if (static_cast<int>(all.size()) != s1.width)
      throw input_error("fused blocks must cover the register");
    w = s1.width;
    frame = s1.frame;
    e = BitString(w, 0);
    for (int p : p1) e = e.with(p, s1.pointers[0].get(p));
    for (int p : p2) e = e.with(p, s2.pointers[0].get(p));
    b1.positions = p1;
    b2.positions = p2;
  } else if (full1 && full2) {
    // Concatenate: s2's positions shift past s1's register.
    w = s1.width + s2.width;
    if (w > 16) throw input_error("fused width out of range");
    if (!s1.frame.empty() || !s2.frame.empty()) {
      frame.resize(token_count(w));
      for (std::uint32_t x = 0; x < frame.size(); ++x) {
        std::uint32_t hi = x >> s2.width;
        std::uint32_t lo = x & (token_count(s2.width) - 1u);
        frame[x] = (s1.framed(hi) << s2.width) | s2.framed(lo);
      }
    }
    e = BitString(w, (s1.pointers[0].index() << s2.width) | s2.pointers[0].index());
    for (int p = 0; p < s1.width; ++p) b1.positions.push_back(p);
    for (int p = 0; p < s2.width; ++p) b2.positions.push_back(s1.width + p);
  } else if (overlap) {
    throw input_error("fusion blocks overlap");
  } else {
    throw input_error("incompatible widths for fusion");
  }

  CoreGroup gu;
  gu.pointer = 0;
  std::set<int> all(b1.positions.begin(), b1.positions.end());
  all.insert(b2.positions.begin(), b2.positions.end());
  gu.positions.assign(all.begin(), all.end());

  DiagramMorphism m;
  m.source = build_diagram(w, {e}, {b1, b2}, frame, /*separate_top=*/true);
  m.target = build_diagram(w, {e}, {gu}, frame, /*separate_top=*/false);
  m.kind = MorKind::Fusion;
  m.split = static_cast<int>(b1.positions.size());

  // Block cores and the split top all land on the merged core; the collapsed
  // psi and top-cone arrows become identity paths there.
  m.node_map.assign(m.source.nodes.size(), -1);
  for (std::size_t i = 0; i < m.source.nodes.size(); ++i) {
    const auto& n = m.source.nodes[i];
    std::string want =
        n.role == Role::Base ? "base.p" + std::to_string(n.position) : std::string("core");
    m.node_map[i] = m.target.node_by_id(want);
    if (m.node_map[i] < 0) throw structure_error("fusion node matching failed");
  }
  m.edge_map.assign(m.source.edges.size(), {});
  for (std::size_t i = 0; i < m.source.edges.size(); ++i) {
    const auto& ed = m.source.edges[i];
    const auto& sn = m.source.nodes[static_cast<std::size_t>(ed.cone ? ed.dst : ed.src)];
    if (sn.role != Role::Base) continue;  // core-to-core arrows collapse
    m.edge_map[i] = {detail::edge_by_name(
        m.target, (ed.cone ? "h.p" : "f.p") + std::to_string(sn.position))};
  }
  check_morphism(m);
  return m;
}

// Rewrites the suffix block (positions prefix_len..width-1) in the rotated
// measurement basis. Classification of raw tokens is unchanged; read-back
// reports pointers in the new frame coordinates.
inline DiagramMorphism basis_rotation(const CCCDiagram& d, int prefix_len,
                                      const std::vector<std::uint32_t>& rho) {
  detail::require_single_component(d, "basis rotation");
  if (prefix_len < 1 || prefix_len >= d.width)
    throw input_error("prefix length must satisfy 1 <= k < width");
  // The rotated block must live inside one sub-core so that the cobordism
  // image acts on a single sector.
  bool block_ok = d.groups.size() == 1;
  for (const auto& g : d.groups) {
    std::set<int> s(g.positions.begin(), g.positions.end());
    bool has_all = true;
    for (int p = prefix_len; p < d.width; ++p) has_all = has_all && s.count(p) > 0;
    bool has_none = true;
    for (int p = prefix_len; p < d.width; ++p) has_none = has_none && s.count(p) == 0;
    block_ok = block_ok || has_all || has_none;
    if (!has_all && !has_none && d.groups.size() > 1)
      throw input_error("rotated block straddles sub-cores");
  }
  (void)block_ok;

  auto lifted = lift_suffix_perm(d.width, prefix_len, rho);
  std::vector<std::uint32_t> new_frame =
      d.frame.empty() ? lifted : compose_perms(d.frame, lifted);

  DiagramMorphism m;
  m.source = d;
  bool separate_top = d.node_by_id("core.top") >= 0;
  m.target = build_diagram(d.width, d.pointers, d.groups, new_frame, separate_top);
  m.kind = MorKind::Rotation;
  m.rot_prefix = prefix_len;
  m.rot = rho;
  m.node_map = detail::match_nodes_by_id(d, m.target);
  m.edge_map.assign(d.edges.size(), {});
  for (std::size_t e = 0; e < d.edges.size(); ++e)
    m.edge_map[e] = {detail::edge_by_name(m.target, d.edges[e].name)};
  check_morphism(m);
  return m;
}

// ---- Co-deployability ----

// Joint assembly: the cocone halves of both diagrams, identity cross arrows
// between same-(group, position) bases, and a fresh apex whose types are the
// column-deduplicated union of both top cores' types. Cone arrows stay out:
// against single-type bases their forced collapsing maps would break even the
// x-with-x joint.
inline CCCDiagram assemble_joint(const CCCDiagram& x, const CCCDiagram& y) {
  if (x.width != y.width) throw input_error("joint assembly requires a shared token scheme");
  int xt = x.top_core(), yt = y.top_core();
  if (xt < 0 || yt < 0) throw input_error("joint assembly requires unique top cores");

  CCCDiagram j;
  j.width = x.width;
  auto import = [&](const CCCDiagram& s, const std::string& prefix) {
    std::vector<int> node_idx(s.nodes.size(), -1);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      DiagNode n = s.nodes[i];
      n.cls.id = prefix + n.cls.id;
      if (n.role == Role::TopCore) n.role = Role::ComponentCore;
      node_idx[i] = static_cast<int>(j.nodes.size());
      j.nodes.push_back(std::move(n));
    }
    for (const auto& e : s.edges) {
      if (e.cone) continue;
      DiagEdge ee = e;
      ee.src = node_idx[static_cast<std::size_t>(e.src)];
      ee.dst = node_idx[static_cast<std::size_t>(e.dst)];
      ee.name = prefix + e.name;
      j.edges.push_back(std::move(ee));
    }
    return node_idx;
  };
  auto xmap = import(x, "x.");
  auto ymap = import(y, "y.");

  // Identity cross arrows x-base -> y-base at matching (group, position).
  for (std::size_t i = 0; i < x.nodes.size(); ++i) {
    if (x.nodes[i].role != Role::Base) continue;
    for (std::size_t k = 0; k < y.nodes.size(); ++k) {
      if (y.nodes[k].role != Role::Base) continue;
      if (x.nodes[i].group != y.nodes[k].group || x.nodes[i].position != y.nodes[k].position)
        continue;
      DiagEdge e;
      e.src = xmap[i];
      e.dst = ymap[k];
      e.tok_map.resize(x.nodes[i].cls.tokens.size());
      for (std::size_t t = 0; t < e.tok_map.size(); ++t) e.tok_map[t] = static_cast<int>(t);
      e.typ_map.assign(x.nodes[i].cls.types.size(), 0);
      e.name = "cross.g" + std::to_string(x.nodes[i].group) + ".p" +
               std::to_string(x.nodes[i].position);
      j.edges.push_back(std::move(e));
    }
  }

  // Apex core over the deduplicated union of top columns.
  std::vector<std::string> types;
  std::vector<std::vector<bool>> cols;
  auto slot_of = [&](const std::vector<bool>& col, const std::string& label) {
    for (std::size_t s = 0; s < cols.size(); ++s)
      if (cols[s] == col) return static_cast<int>(s);
    cols.push_back(col);
    types.push_back(label);
    return static_cast<int>(cols.size() - 1);
  };
  std::vector<int> x_slots, y_slots;
  const auto& xcls = x.nodes[static_cast<std::size_t>(xt)].cls;
  for (std::size_t a = 0; a < xcls.types.size(); ++a)
    x_slots.push_back(slot_of(xcls.column(static_cast<int>(a)), "x." + xcls.types[a]));
  const auto& ycls = y.nodes[static_cast<std::size_t>(yt)].cls;
  for (std::size_t a = 0; a < ycls.types.size(); ++a)
    y_slots.push_back(slot_of(ycls.column(static_cast<int>(a)), "y." + ycls.types[a]));

  std::vector<std::vector<bool>> rel(token_count(j.width), std::vector<bool>(types.size()));
  for (std::uint32_t t = 0; t < token_count(j.width); ++t)
    for (std::size_t a = 0; a < cols.size(); ++a) rel[t][a] = cols[a][t];
  DiagNode apex;
  apex.cls = Classifier("core.joint", all_token_labels(j.width), types, rel);
  apex.role = Role::TopCore;
  int apex_idx = static_cast<int>(j.nodes.size());
  j.nodes.push_back(std::move(apex));

  auto add_psi = [&](int core, const std::vector<int>& slots, const std::string& name) {
    DiagEdge e;
    e.src = core;
    e.dst = apex_idx;
    e.tok_map.resize(token_count(j.width));
    for (std::uint32_t t = 0; t < token_count(j.width); ++t) e.tok_map[t] = static_cast<int>(t);
    e.typ_map = slots;
    e.name = name;
    j.edges.push_back(std::move(e));
  };
  add_psi(xmap[static_cast<std::size_t>(xt)], x_slots, "psi.x");
  add_psi(ymap[static_cast<std::size_t>(yt)], y_slots, "psi.y");
  return j;
}

struct CoDeployReport {
  bool ok = false;
  std::vector<EdgeCheck> bad_edges;
  CommuteReport commute;
  CCCDiagram joint;
};

// Two diagrams co-deploy iff the joint assembly has only valid arrows and
// commutes.
inline CoDeployReport co_deployable(const CCCDiagram& x, const CCCDiagram& y) {
  CoDeployReport rep;
  rep.joint = assemble_joint(x, y);
  for (std::size_t e = 0; e < rep.joint.edges.size(); ++e) {
    const auto& ed = rep.joint.edges[e];
    auto r = validate_infomorphism(rep.joint.nodes[static_cast<std::size_t>(ed.src)].cls,
                                   rep.joint.nodes[static_cast<std::size_t>(ed.dst)].cls,
                                   ed.tok_map, ed.typ_map);
    if (!r.ok) rep.bad_edges.push_back({static_cast<int>(e), std::move(r)});
  }
  rep.commute = check_commutes(rep.joint);
  rep.ok = rep.bad_edges.empty() && rep.commute.ok;
  return rep;
}

// Removes the listed base nodes and rebuilds every core over the survivors.
// Coarsens classification; read-back guarantees no longer apply.
inline CCCDiagram restrict_without(const CCCDiagram& y, const std::vector<int>& removed_bases) {
  std::set<int> removed(removed_bases.begin(), removed_bases.end());
  for (int r : removed) {
    if (r < 0 || r >= static_cast<int>(y.nodes.size()))
      throw input_error("removed node index out of range");
    if (y.nodes[static_cast<std::size_t>(r)].role != Role::Base)
      throw input_error("only base classifiers can be removed");
  }

  CCCDiagram d;
  d.width = y.width;
  // Survivor bases grouped by their sub-core tag.
  std::map<int, std::vector<int>> by_group;  // group -> original node indices
  std::map<int, int> group_core;             // group -> original core node
  for (std::size_t i = 0; i < y.nodes.size(); ++i) {
    const auto& n = y.nodes[i];
    if (n.role == Role::Base && !removed.count(static_cast<int>(i)))
      by_group[n.group].push_back(static_cast<int>(i));
    if (n.role != Role::Base && n.group >= 0) group_core[n.group] = static_cast<int>(i);
  }
  // Also track groups that lost every base: their cores survive, degenerate.
  for (auto& [g, core] : group_core)
    if (!by_group.count(g)) by_group[g] = {};

  int n_groups = static_cast<int>(by_group.size());
  bool multi = y.nodes_with_role(Role::ComponentCore).size() > 0;
  (void)multi;

  std::map<int, int> new_base_idx;
  for (auto& [g, bases] : by_group) {
    for (int b : bases) {
      DiagNode n = y.nodes[static_cast<std::size_t>(b)];
      new_base_idx[b] = static_cast<int>(d.nodes.size());
      d.nodes.push_back(std::move(n));
    }
  }
  // Rebuilt group cores.
  std::map<int, int> new_core_idx;
  for (auto& [g, bases] : by_group) {
    std::vector<std::string> types;
    std::vector<std::vector<bool>> cols;
    for (int b : bases) {
      const auto& base = y.nodes[static_cast<std::size_t>(b)].cls;
      types.push_back(base.types[0]);
      cols.push_back(base.column(0));
    }
    std::vector<bool> conj(token_count(d.width), true);
    for (const auto& c : cols)
      for (std::uint32_t x = 0; x < conj.size(); ++x) conj[x] = conj[x] && c[x];
    std::string core_id = group_core.count(g)
                              ? y.nodes[static_cast<std::size_t>(group_core[g])].cls.id
                              : ("core.b" + std::to_string(g));
    std::string pi_label = "pi.g" + std::to_string(g);
    types.push_back(pi_label);
    cols.push_back(conj);
    std::vector<std::vector<bool>> rel(token_count(d.width), std::vector<bool>(types.size()));
    for (std::uint32_t x = 0; x < token_count(d.width); ++x)
      for (std::size_t a = 0; a < cols.size(); ++a) rel[x][a] = cols[a][x];
    DiagNode n;
    n.cls = Classifier(core_id, all_token_labels(d.width), types, rel);
    n.role = n_groups == 1 ? Role::TopCore : Role::ComponentCore;
    n.group = g;
    new_core_idx[g] = static_cast<int>(d.nodes.size());
    d.nodes.push_back(std::move(n));
  }
  // Top core over group conjunctions when there are several groups.
  if (n_groups > 1) {
    std::vector<std::string> types;
    std::vector<std::vector<bool>> cols;
    for (auto& [g, core] : new_core_idx) {
      const auto& c = d.nodes[static_cast<std::size_t>(core)].cls;
      for (std::size_t a = 0; a < c.types.size(); ++a) {
        types.push_back(c.types[a]);
        cols.push_back(c.column(static_cast<int>(a)));
      }
    }
    std::vector<bool> disj(token_count(d.width), false);
    for (auto& [g, core] : new_core_idx) {
      const auto& c = d.nodes[static_cast<std::size_t>(core)].cls;
      auto conj = c.column(static_cast<int>(c.types.size()) - 1);
      for (std::uint32_t x = 0; x < disj.size(); ++x) disj[x] = disj[x] || conj[x];
    }
    types.push_back("sigma");
    cols.push_back(disj);
    std::vector<std::vector<bool>> rel(token_count(d.width), std::vector<bool>(types.size()));
    for (std::uint32_t x = 0; x < token_count(d.width); ++x)
      for (std::size_t a = 0; a < cols.size(); ++a) rel[x][a] = cols[a][x];
    DiagNode n;
    n.cls = Classifier("core.top", all_token_labels(d.width), types, rel);
    n.role = Role::TopCore;
    d.nodes.push_back(std::move(n));
  }

  auto id_tok = [&] {
    std::vector<int> v(token_count(d.width));
    for (std::uint32_t x = 0; x < token_count(d.width); ++x) v[x] = static_cast<int>(x);
    return v;
  };
  // Cocone arrows base -> group core and group core -> top.
  for (auto& [g, bases] : by_group) {
    int slot = 0;
    for (int b : bases) {
      DiagEdge e;
      e.src = new_base_idx[b];
      e.dst = new_core_idx[g];
      e.tok_map = id_tok();
      e.typ_map = {slot++};
      e.name = "f." + d.nodes[static_cast<std::size_t>(e.src)].cls.id;
      d.edges.push_back(std::move(e));
    }
  }
  if (n_groups > 1) {
    int top = static_cast<int>(d.nodes.size()) - 1;
    int offset = 0;
    for (auto& [g, core] : new_core_idx) {
      const auto& c = d.nodes[static_cast<std::size_t>(core)].cls;
      DiagEdge e;
      e.src = core;
      e.dst = top;
      e.tok_map = id_tok();
      for (std::size_t a = 0; a < c.types.size(); ++a)
        e.typ_map.push_back(offset + static_cast<int>(a));
      offset += static_cast<int>(c.types.size());
      e.name = "psi.g" + std::to_string(g);
      d.edges.push_back(std::move(e));
    }
  }
  // Cone arrows where both witnesses exist (first-token canonical choice).
  {
    std::vector<std::vector<bool>> base_cols;
    for (const auto& n : d.nodes)
      if (n.role == Role::Base) base_cols.push_back(n.cls.column(0));
    int fail = detail::first_token_where(base_cols, false, d.width);
    for (auto& [g, bases] : by_group) {
      int core = new_core_idx[g];
      const auto& c = d.nodes[static_cast<std::size_t>(core)].cls;
      std::vector<std::vector<bool>> core_cols;
      for (std::size_t a = 0; a < c.types.size(); ++a) core_cols.push_back(c.column(static_cast<int>(a)));
      int sat = detail::first_token_where(core_cols, true, d.width);
      if (sat < 0 || fail < 0) continue;
      for (int b : bases) {
        const auto& col = d.nodes[static_cast<std::size_t>(new_base_idx[b])].cls.column(0);
        DiagEdge e;
        e.src = core;
        e.dst = new_base_idx[b];
        e.cone = true;
        e.typ_map.assign(c.types.size(), 0);
        e.tok_map.resize(token_count(d.width));
        for (std::uint32_t x = 0; x < token_count(d.width); ++x) e.tok_map[x] = col[x] ? sat : fail;
        e.name = "h." + d.nodes[static_cast<std::size_t>(new_base_idx[b])].cls.id;
        d.edges.push_back(std::move(e));
      }
    }
  }
  return d;
}

}  // namespace qrflow
