#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrflow/cyclotomic.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/group.hpp"
#include "qrflow/parallel.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

struct GraphLink {
  int src = 0, dst = 0;
  std::string label;
};

struct TqnnGraph {
  int n_nodes = 0;
  std::vector<GraphLink> links;
};

inline void validate_graph(const TqnnGraph& g) {
  if (g.n_nodes < 1) throw input_error("graph needs at least one node");
  for (const auto& l : g.links)
    if (l.src < 0 || l.src >= g.n_nodes || l.dst < 0 || l.dst >= g.n_nodes)
      throw input_error("link endpoint out of range");
}

// One traversal step: a link, possibly against its orientation.
struct PathStep {
  int link = 0;
  bool reverse = false;
};

using Face = std::vector<PathStep>;

// Holonomy of a head-to-tail path: ordered product with later steps
// multiplying on the left; reversed steps contribute the inverse.
inline int holonomy(const FiniteGroup& g, const TqnnGraph& graph,
                    const std::vector<int>& config, const std::vector<PathStep>& path) {
  if (config.size() != graph.links.size()) throw input_error("one group element per link required");
  int acc = g.identity;
  int cur = -1;
  for (const auto& step : path) {
    if (step.link < 0 || step.link >= static_cast<int>(graph.links.size()))
      throw input_error("path link out of range");
    const auto& l = graph.links[static_cast<std::size_t>(step.link)];
    int start = step.reverse ? l.dst : l.src;
    int end = step.reverse ? l.src : l.dst;
    if (cur >= 0 && cur != start) throw input_error("path is disconnected");
    cur = end;
    int el = config[static_cast<std::size_t>(step.link)];
    if (step.reverse) el = g.inv(el);
    acc = g.times(el, acc);
  }
  return acc;
}

// A face must traverse a closed connected cycle.
inline void validate_face(const TqnnGraph& graph, const Face& face) {
  if (face.empty()) throw input_error("face cycle is empty");
  int cur = -1, first = -1;
  for (const auto& step : face) {
    if (step.link < 0 || step.link >= static_cast<int>(graph.links.size()))
      throw input_error("face link out of range");
    const auto& l = graph.links[static_cast<std::size_t>(step.link)];
    int start = step.reverse ? l.dst : l.src;
    int end = step.reverse ? l.src : l.dst;
    if (cur < 0) first = start;
    else if (cur != start) throw input_error("face cycle is disconnected");
    cur = end;
  }
  if (cur != first) throw input_error("face cycle does not close");
}

// ---- Cylindrical functions: dense tables over G^E ----

// Table index: link 0 is the most significant digit base |G|.
struct CylFn {
  int group_order = 1;
  int n_links = 0;
  std::vector<Cyc> table;
};

inline std::uint64_t config_count(const FiniteGroup& g, std::size_t links) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < links; ++i) {
    n *= static_cast<std::uint64_t>(g.order);
    if (n > (1ull << 24)) throw input_error("configuration space too large for dense tables");
  }
  return n;
}

inline std::vector<int> config_at(const FiniteGroup& g, std::size_t links, std::uint64_t index) {
  std::vector<int> out(links);
  for (std::size_t e = links; e-- > 0;) {
    out[e] = static_cast<int>(index % static_cast<std::uint64_t>(g.order));
    index /= static_cast<std::uint64_t>(g.order);
  }
  return out;
}

inline std::uint64_t config_index(const FiniteGroup& g, const std::vector<int>& config) {
  std::uint64_t idx = 0;
  for (int v : config) idx = idx * static_cast<std::uint64_t>(g.order) + static_cast<std::uint64_t>(v);
  return idx;
}

inline CylFn constant_cyl(const FiniteGroup& g, const TqnnGraph& graph, const Cyc& value) {
  CylFn f;
  f.group_order = g.order;
  f.n_links = static_cast<int>(graph.links.size());
  f.table.assign(config_count(g, graph.links.size()), value);
  return f;
}

// Product of characters, one irrep label per link.
inline CylFn character_product(const FiniteGroup& g, const TqnnGraph& graph,
                               const std::vector<int>& labels) {
  validate_graph(graph);
  if (labels.size() != graph.links.size()) throw input_error("one irrep label per link required");
  for (int l : labels)
    if (l < 0 || l >= g.irrep_count()) throw input_error("irrep label out of range");
  CylFn f;
  f.group_order = g.order;
  f.n_links = static_cast<int>(graph.links.size());
  std::uint64_t n = config_count(g, graph.links.size());
  f.table.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto cfg = config_at(g, graph.links.size(), i);
    Cyc v(1);
    for (std::size_t e = 0; e < cfg.size(); ++e)
      v *= g.characters[static_cast<std::size_t>(labels[e])][static_cast<std::size_t>(cfg[e])];
    f.table[i] = v;
  }
  return f;
}

inline void check_same_shape(const FiniteGroup& g, const TqnnGraph& graph, const CylFn& a) {
  if (a.group_order != g.order || a.n_links != static_cast<int>(graph.links.size()) ||
      a.table.size() != config_count(g, graph.links.size()))
    throw input_error("cylindrical function does not match the graph and group");
}

// Normalized Haar pairing: (1/|G|^E) sum over configurations of conj(psi)*phi.
inline Cyc kinematic_inner(const FiniteGroup& g, const TqnnGraph& graph, const CylFn& psi,
                           const CylFn& phi) {
  check_same_shape(g, graph, psi);
  check_same_shape(g, graph, phi);
  std::uint64_t n = psi.table.size();
  std::size_t workers = worker_count();
  std::uint64_t chunk = (n + workers - 1) / workers;
  auto partials = parallel_map<Cyc>(workers, [&](std::size_t w) {
    Cyc acc;
    std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
    std::uint64_t hi = std::min(n, lo + chunk);
    for (std::uint64_t i = lo; i < hi; ++i) acc += cyc_conj(psi.table[i]) * phi.table[i];
    return acc;
  });
  Cyc total;
  for (const auto& p : partials) total += p;
  return total * Cyc(rat_pow(Rat(g.order), -static_cast<long long>(graph.links.size())));
}

// psi composed with the gauge transformation h: value at {H_e} becomes the
// value at {h_t(e) H_e h_s(e)^-1}.
inline CylFn gauge_transform(const FiniteGroup& g, const TqnnGraph& graph, const CylFn& psi,
                             const std::vector<int>& h) {
  check_same_shape(g, graph, psi);
  if (h.size() != static_cast<std::size_t>(graph.n_nodes))
    throw input_error("one gauge element per node required");
  CylFn out = psi;
  std::uint64_t n = psi.table.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    auto cfg = config_at(g, graph.links.size(), i);
    for (std::size_t e = 0; e < cfg.size(); ++e) {
      const auto& l = graph.links[e];
      cfg[e] = g.times(h[static_cast<std::size_t>(l.dst)],
                       g.times(cfg[e], g.inv(h[static_cast<std::size_t>(l.src)])));
    }
    out.table[i] = psi.table[config_index(g, cfg)];
  }
  return out;
}

// Projection onto gauge invariants: average over all node assignments.
inline CylFn gauge_average(const FiniteGroup& g, const TqnnGraph& graph, const CylFn& psi) {
  check_same_shape(g, graph, psi);
  std::uint64_t n_cfg = psi.table.size();
  std::uint64_t n_gauge = 1;
  for (int v = 0; v < graph.n_nodes; ++v) {
    n_gauge *= static_cast<std::uint64_t>(g.order);
    if (n_gauge > (1ull << 24)) throw input_error("gauge orbit too large for dense averaging");
  }
  Rat norm = rat_pow(Rat(g.order), -static_cast<long long>(graph.n_nodes));
  CylFn out;
  out.group_order = psi.group_order;
  out.n_links = psi.n_links;
  out.table.resize(n_cfg);
  auto rows = parallel_map<Cyc>(static_cast<std::size_t>(n_cfg), [&](std::size_t i) {
    auto cfg = config_at(g, graph.links.size(), static_cast<std::uint64_t>(i));
    Cyc acc;
    for (std::uint64_t hidx = 0; hidx < n_gauge; ++hidx) {
      // Decode the node assignment.
      std::uint64_t rest = hidx;
      std::vector<int> h(static_cast<std::size_t>(graph.n_nodes));
      for (std::size_t v = h.size(); v-- > 0;) {
        h[v] = static_cast<int>(rest % static_cast<std::uint64_t>(g.order));
        rest /= static_cast<std::uint64_t>(g.order);
      }
      auto moved = cfg;
      for (std::size_t e = 0; e < moved.size(); ++e) {
        const auto& l = graph.links[e];
        moved[e] = g.times(h[static_cast<std::size_t>(l.dst)],
                           g.times(cfg[e], g.inv(h[static_cast<std::size_t>(l.src)])));
      }
      acc += psi.table[config_index(g, moved)];
    }
    return acc * Cyc(norm);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) out.table[i] = rows[i];
  return out;
}

inline bool cyl_equal(const CylFn& a, const CylFn& b) {
  if (a.group_order != b.group_order || a.n_links != b.n_links || a.table.size() != b.table.size())
    return false;
  for (std::size_t i = 0; i < a.table.size(); ++i)
    if (a.table[i] != b.table[i]) return false;
  return true;
}

// Flatness-projected pairing. Each face inserts delta(H_face) with the
// normalization delta(g) = |G|*[g = identity], so the value equals
// |G|^(|faces| - |E|) times the sum of conj(psi)*phi over flat configurations.
// delta_power > 1 inserts the delta product that many times.
inline Cyc physical_inner(const FiniteGroup& g, const TqnnGraph& graph, const CylFn& psi,
                          const CylFn& phi, const std::vector<Face>& faces,
                          int delta_power = 1) {
  check_same_shape(g, graph, psi);
  check_same_shape(g, graph, phi);
  for (const auto& f : faces) validate_face(graph, f);
  if (delta_power < 1) throw input_error("delta power must be at least 1");
  std::uint64_t n = psi.table.size();
  std::size_t workers = worker_count();
  std::uint64_t chunk = (n + workers - 1) / workers;
  auto partials = parallel_map<Cyc>(workers, [&](std::size_t w) {
    Cyc acc;
    std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
    std::uint64_t hi = std::min(n, lo + chunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      auto cfg = config_at(g, graph.links.size(), i);
      bool flat = true;
      for (const auto& f : faces)
        if (holonomy(g, graph, cfg, f) != g.identity) { flat = false; break; }
      if (!flat) continue;
      acc += cyc_conj(psi.table[i]) * phi.table[i];
    }
    return acc;
  });
  Cyc total;
  for (const auto& p : partials) total += p;
  long long exponent = static_cast<long long>(delta_power) * static_cast<long long>(faces.size()) -
                       static_cast<long long>(graph.links.size());
  return total * Cyc(rat_pow(Rat(g.order), exponent));
}

// Partition function: physical pairing of the constant function with itself,
// evaluated directly as |G|^(|faces|-|E|) * #flat.
inline Rat partition_function(const FiniteGroup& g, const TqnnGraph& graph,
                              const std::vector<Face>& faces) {
  validate_graph(graph);
  for (const auto& f : faces) validate_face(graph, f);
  std::uint64_t n = config_count(g, graph.links.size());
  std::size_t workers = worker_count();
  std::uint64_t chunk = (n + workers - 1) / workers;
  auto partials = parallel_map<std::uint64_t>(workers, [&](std::size_t w) {
    std::uint64_t count = 0;
    std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
    std::uint64_t hi = std::min(n, lo + chunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      auto cfg = config_at(g, graph.links.size(), i);
      bool flat = true;
      for (const auto& f : faces)
        if (holonomy(g, graph, cfg, f) != g.identity) { flat = false; break; }
      if (flat) ++count;
    }
    return count;
  });
  std::uint64_t flat_total = 0;
  for (auto c : partials) flat_total += c;
  long long exponent = static_cast<long long>(faces.size()) - static_cast<long long>(graph.links.size());
  return rat_pow(Rat(g.order), exponent) * Rat(static_cast<Int>(flat_total));
}

// ---- Subdivision ----

// Splits link k by a fresh bivalent node: k becomes (src -> new), and a new
// final link (new -> dst) is appended.
inline TqnnGraph subdivide_link(const TqnnGraph& graph, int k) {
  validate_graph(graph);
  if (k < 0 || k >= static_cast<int>(graph.links.size())) throw input_error("link index out of range");
  TqnnGraph out = graph;
  int fresh = out.n_nodes++;
  int old_dst = out.links[static_cast<std::size_t>(k)].dst;
  out.links[static_cast<std::size_t>(k)].dst = fresh;
  out.links[static_cast<std::size_t>(k)].label += ".a";
  GraphLink tail;
  tail.src = fresh;
  tail.dst = old_dst;
  tail.label = graph.links[static_cast<std::size_t>(k)].label + ".b";
  out.links.push_back(tail);
  return out;
}

// Lift of a state along subdivide_link: the two half-links compose back to
// the original holonomy, so value'(.., a, .., b) = value(.., b*a, ..).
inline CylFn lift_subdivided(const FiniteGroup& g, const TqnnGraph& original, const CylFn& psi,
                             int k) {
  check_same_shape(g, original, psi);
  TqnnGraph sub = subdivide_link(original, k);
  CylFn out;
  out.group_order = g.order;
  out.n_links = static_cast<int>(sub.links.size());
  std::uint64_t n = config_count(g, sub.links.size());
  out.table.resize(n);
  std::size_t tail = sub.links.size() - 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto cfg = config_at(g, sub.links.size(), i);
    std::vector<int> orig_cfg(cfg.begin(), cfg.end() - 1);
    orig_cfg[static_cast<std::size_t>(k)] = g.times(cfg[tail], cfg[static_cast<std::size_t>(k)]);
    out.table[i] = psi.table[config_index(g, orig_cfg)];
  }
  return out;
}

// Face traversals rewritten through the subdivided link.
inline std::vector<Face> lift_faces_subdivided(const std::vector<Face>& faces, int k,
                                               int tail_index) {
  std::vector<Face> out;
  for (const auto& f : faces) {
    Face nf;
    for (const auto& step : f) {
      if (step.link != k) {
        nf.push_back(step);
      } else if (!step.reverse) {
        nf.push_back({k, false});
        nf.push_back({tail_index, false});
      } else {
        nf.push_back({tail_index, true});
        nf.push_back({k, true});
      }
    }
    out.push_back(std::move(nf));
  }
  return out;
}

// ---- Spin networks ----

// Irrep labels on links plus the invariant-subspace dimension at each node
// (the intertwiner space: Hom(trivial, tensor of incident irreps, with
// outgoing links contributing the dual)).
struct SpinNetworkState {
  TqnnGraph graph;
  std::vector<int> irrep;
  std::vector<Rat> intertwiner_dim;  // per node
  bool gauge_invariant = false;
};

inline SpinNetworkState make_spin_network(const FiniteGroup& g, const TqnnGraph& graph,
                                          const std::vector<int>& labels) {
  validate_graph(graph);
  if (labels.size() != graph.links.size()) throw input_error("one irrep label per link required");
  for (int l : labels)
    if (l < 0 || l >= g.irrep_count()) throw input_error("irrep label out of range");
  SpinNetworkState s;
  s.graph = graph;
  s.irrep = labels;
  // Multiplicity of the trivial irrep at node v: (1/|G|) sum_g prod over
  // incident links of chi (incoming) or conj(chi) (outgoing).
  for (int v = 0; v < graph.n_nodes; ++v) {
    Cyc acc;
    for (int e = 0; e < g.order; ++e) {
      Cyc term(1);
      for (std::size_t l = 0; l < graph.links.size(); ++l) {
        const auto& chi = g.characters[static_cast<std::size_t>(labels[l])][static_cast<std::size_t>(e)];
        if (graph.links[l].dst == v) term *= chi;
        if (graph.links[l].src == v) term *= cyc_conj(chi);
      }
      acc += term;
    }
    Cyc dim = acc * Cyc(Rat(1, g.order));
    if (!dim.is_rational()) throw structure_error("intertwiner multiplicity came out irrational");
    s.intertwiner_dim.push_back(dim.rat());
  }
  // Gauge-invariance fixed-point test on the character-product function.
  CylFn cyl = character_product(g, graph, labels);
  s.gauge_invariant = cyl_equal(gauge_average(g, graph, cyl), cyl);
  return s;
}

// ---- Images ----

struct TQNNImage {
  int height = 0, width = 0;
  std::vector<int> grey;  // row major, levels 0..10

  int at(int r, int c) const { return grey[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)]; }
};

inline void validate_image(const TQNNImage& img) {
  if (img.height < 1 || img.width < 1) throw input_error("image grid is empty");
  if (img.grey.size() != static_cast<std::size_t>(img.height) * static_cast<std::size_t>(img.width))
    throw input_error("image data size mismatch");
  for (int v : img.grey)
    if (v < 0 || v > 10) throw input_error("grey level out of range 0..10");
}

// The dual-lattice encoding: one node per pixel, links between adjacent
// pixels weighted by the smaller grey level, boundary legs kept as metadata.
struct EncodedImage {
  TqnnGraph graph;
  std::vector<int> weight;  // per link: m_ij = min(m_i, m_j)
  std::vector<std::pair<int, std::string>> stubs;  // (node, side) open boundary legs
  int grid_h = 0, grid_w = 0;
};

inline EncodedImage image_to_tqnn(const TQNNImage& img) {
  validate_image(img);
  EncodedImage out;
  out.grid_h = img.height;
  out.grid_w = img.width;
  out.graph.n_nodes = img.height * img.width;
  auto node = [&](int r, int c) { return r * img.width + c; };
  // Horizontal links first, then vertical, both row major.
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c + 1 < img.width; ++c) {
      GraphLink l;
      l.src = node(r, c);
      l.dst = node(r, c + 1);
      l.label = "h" + std::to_string(r) + "." + std::to_string(c);
      out.graph.links.push_back(l);
      out.weight.push_back(std::min(img.at(r, c), img.at(r, c + 1)));
    }
  for (int r = 0; r + 1 < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      GraphLink l;
      l.src = node(r, c);
      l.dst = node(r + 1, c);
      l.label = "v" + std::to_string(r) + "." + std::to_string(c);
      out.graph.links.push_back(l);
      out.weight.push_back(std::min(img.at(r, c), img.at(r + 1, c)));
    }
  for (int c = 0; c < img.width; ++c) out.stubs.push_back({node(0, c), "n"});
  for (int r = 0; r < img.height; ++r) out.stubs.push_back({node(r, img.width - 1), "e"});
  for (int c = 0; c < img.width; ++c) out.stubs.push_back({node(img.height - 1, c), "s"});
  for (int r = 0; r < img.height; ++r) out.stubs.push_back({node(r, 0), "w"});
  return out;
}

// Half-integer spin labels j = m/2, exact.
inline std::vector<Rat> su2_labels(const EncodedImage& enc) {
  std::vector<Rat> out;
  for (int m : enc.weight) out.push_back(Rat(m, 2));
  return out;
}

// Plaquette cycles of the pixel lattice, matching image_to_tqnn's link order.
inline std::vector<Face> lattice_faces(int h, int w) {
  if (h < 1 || w < 1) throw input_error("lattice dimensions must be positive");
  auto hlink = [&](int r, int c) { return r * (w - 1) + c; };
  auto vlink = [&](int r, int c) { return h * (w - 1) + r * w + c; };
  std::vector<Face> out;
  for (int r = 0; r + 1 < h; ++r)
    for (int c = 0; c + 1 < w; ++c) {
      Face f;
      f.push_back({hlink(r, c), false});
      f.push_back({vlink(r, c + 1), false});
      f.push_back({hlink(r + 1, c), true});
      f.push_back({vlink(r, c), true});
      out.push_back(std::move(f));
    }
  return out;
}

// The gauge-invariant state of an encoded image over Z_n: the gauge average
// of the product of link characters at charge m mod n.
inline CylFn abelian_state(const FiniteGroup& g, const EncodedImage& enc) {
  if (!g.abelian) throw input_error("image states require an abelian group");
  std::vector<int> labels;
  for (int m : enc.weight) labels.push_back(m % g.order);
  return gauge_average(g, enc.graph, character_product(g, enc.graph, labels));
}

// ---- Classifier ----

struct ClassifyEntry {
  int archetype = -1;
  bool classifiable = true;
  Cyc score_num;  // |<test, k>|^2, exact
  Cyc score_den;  // <test,test> * <k,k>, exact
  long double score = 0;  // sqrt(num/den), for display

  // Exact test for a perfect normalized overlap.
  bool exact_unit() const { return classifiable && score_num == score_den; }
};

struct ClassifyResult {
  bool test_degenerate = false;
  std::vector<ClassifyEntry> ranked;  // descending score; unclassifiable last
};

namespace detail {

inline long double cyc_real(const Cyc& v) { return cyc_approx(v).first; }

// score_a > score_b, exactly: num_a*den_b vs num_b*den_a (all real, nonneg).
inline bool score_greater(const ClassifyEntry& a, const ClassifyEntry& b) {
  Cyc lhs = a.score_num * b.score_den;
  Cyc rhs = b.score_num * a.score_den;
  if (lhs == rhs) return false;
  return cyc_real(lhs) > cyc_real(rhs);
}

}  // namespace detail

// Ranks archetypes by normalized physical overlap with the test image.
// Squared scores are kept exact; zero-norm states are unclassifiable.
inline ClassifyResult tqnn_classify(const FiniteGroup& g, const TQNNImage& test,
                                    const std::vector<TQNNImage>& archetypes,
                                    const std::vector<Face>& faces) {
  validate_image(test);
  if (archetypes.empty()) throw input_error("at least one archetype required");
  for (const auto& a : archetypes)
    if (a.height != test.height || a.width != test.width)
      throw input_error("archetype shape mismatch");

  auto enc_test = image_to_tqnn(test);
  CylFn psi = abelian_state(g, enc_test);
  Cyc norm_test = physical_inner(g, enc_test.graph, psi, psi, faces);

  ClassifyResult res;
  res.test_degenerate = norm_test.is_zero();
  for (std::size_t k = 0; k < archetypes.size(); ++k) {
    auto enc = image_to_tqnn(archetypes[k]);
    CylFn phi = abelian_state(g, enc);
    Cyc norm_arch = physical_inner(g, enc.graph, phi, phi, faces);
    ClassifyEntry entry;
    entry.archetype = static_cast<int>(k);
    if (res.test_degenerate || norm_arch.is_zero()) {
      entry.classifiable = false;
      res.ranked.push_back(entry);
      continue;
    }
    Cyc overlap = physical_inner(g, enc_test.graph, psi, phi, faces);
    entry.score_num = cyc_abs_sq(overlap);
    entry.score_den = norm_test * norm_arch;
    long double num = detail::cyc_real(entry.score_num);
    long double den = detail::cyc_real(entry.score_den);
    entry.score = den > 0 ? std::sqrt(num / den) : 0.0L;
    res.ranked.push_back(entry);
  }
  std::stable_sort(res.ranked.begin(), res.ranked.end(),
                   [](const ClassifyEntry& a, const ClassifyEntry& b) {
                     if (a.classifiable != b.classifiable) return a.classifiable;
                     if (!a.classifiable) return false;
                     return detail::score_greater(a, b);
                   });
  return res;
}

}  // namespace qrflow
