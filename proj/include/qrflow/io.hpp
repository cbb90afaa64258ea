#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qrflow/bitstring.hpp"
#include "qrflow/cccd.hpp"
#include "qrflow/classifier.hpp"
#include "qrflow/cobordism.hpp"
#include "qrflow/cyclotomic.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/qrf.hpp"
#include "qrflow/quiver.hpp"
#include "qrflow/rational.hpp"
#include "qrflow/tqnn.hpp"

namespace qrflow {

using Json = nlohmann::json;  // std::map keys, so emitted objects are sorted

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw parse_error(e.what(), e.byte);
  }
}

// Fetch a required key or fail with the key name in the message.
inline const Json& json_field(const Json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw parse_error("missing field: " + key, 0);
  return *it;
}

// ---- Rationals and cyclotomics ----

inline Json rat_to_json(const Rat& r) { return rat_str(r); }

inline Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return parse_rat(j.get<std::string>());
  throw parse_error("expected a rational as \"a/b\" or an integer", 0);
}

inline Json cyc_to_json(const Cyc& v) {
  Json coeffs = Json::array();
  for (const auto& c : v.c) coeffs.push_back(rat_to_json(c));
  return Json{{"order", v.order}, {"coeffs", coeffs}, {"display", cyc_str(v)}};
}

// ---- Classifiers and infomorphisms ----

inline Json classifier_to_json(const Classifier& c) {
  Json rel = Json::array();
  for (std::size_t t = 0; t < c.tokens.size(); ++t) {
    std::string row;
    for (std::size_t y = 0; y < c.types.size(); ++y) row += c.rel[t][y] ? '1' : '0';
    rel.push_back(row);
  }
  return Json{{"id", c.id}, {"tokens", c.tokens}, {"types", c.types}, {"rel", rel}};
}

inline Classifier classifier_from_json(const Json& j) {
  Classifier c;
  if (j.contains("id")) c.id = j["id"].get<std::string>();
  c.tokens = json_field(j, "tokens").get<std::vector<std::string>>();
  c.types = json_field(j, "types").get<std::vector<std::string>>();
  const Json& rel = json_field(j, "rel");
  if (!rel.is_array() || rel.size() != c.tokens.size())
    throw parse_error("rel needs one bit-row per token", 0);
  for (const auto& row : rel) {
    std::string s = row.get<std::string>();
    if (s.size() != c.types.size()) throw parse_error("rel row width must match type count", 0);
    std::vector<bool> bits;
    for (char ch : s) {
      if (ch != '0' && ch != '1') throw parse_error("rel rows must be 0/1 strings", 0);
      bits.push_back(ch == '1');
    }
    c.rel.push_back(bits);
  }
  try {
    c.validate();
  } catch (const error& e) {
    throw parse_error(e.what(), 0);
  }
  return c;
}

inline Json infomorphism_to_json(const Infomorphism& f) {
  Json tok = Json::object();
  for (std::size_t d = 0; d < f.tok_map.size(); ++d)
    tok[f.dst.tokens[d]] = f.src.tokens[static_cast<std::size_t>(f.tok_map[d])];
  Json typ = Json::object();
  for (std::size_t s = 0; s < f.typ_map.size(); ++s)
    typ[f.src.types[s]] = f.dst.types[static_cast<std::size_t>(f.typ_map[s])];
  return Json{{"src", classifier_to_json(f.src)},
              {"dst", classifier_to_json(f.dst)},
              {"tokMap", tok},
              {"typMap", typ}};
}

inline Infomorphism infomorphism_from_json(const Json& j) {
  Classifier src = classifier_from_json(json_field(j, "src"));
  Classifier dst = classifier_from_json(json_field(j, "dst"));
  auto index_of = [](const std::vector<std::string>& v, const std::string& s, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == s) return static_cast<int>(i);
    throw parse_error(std::string("unknown ") + what + " label: " + s, 0);
  };
  const Json& tok = json_field(j, "tokMap");
  std::vector<int> tok_map(dst.tokens.size(), -1);
  for (auto it = tok.begin(); it != tok.end(); ++it)
    tok_map[static_cast<std::size_t>(index_of(dst.tokens, it.key(), "token"))] =
        index_of(src.tokens, it.value().get<std::string>(), "token");
  const Json& typ = json_field(j, "typMap");
  std::vector<int> typ_map(src.types.size(), -1);
  for (auto it = typ.begin(); it != typ.end(); ++it)
    typ_map[static_cast<std::size_t>(index_of(src.types, it.key(), "type"))] =
        index_of(dst.types, it.value().get<std::string>(), "type");
  for (int v : tok_map)
    if (v < 0) throw parse_error("tokMap must cover every destination token", 0);
  for (int v : typ_map)
    if (v < 0) throw parse_error("typMap must cover every source type", 0);
  return Infomorphism(std::move(src), std::move(dst), std::move(tok_map), std::move(typ_map));
}

// ---- QRF spec files ----

struct QrfSpec {
  int width = 1;
  std::vector<BitString> pointers;
  bool has_table = false;
  std::vector<std::vector<Rat>> table;  // row i, column j = p_ij
};

inline QrfSpec qrf_spec_from_json(const Json& j) {
  QrfSpec spec;
  spec.width = json_field(j, "width").get<int>();
  for (const auto& p : json_field(j, "pointers"))
    spec.pointers.push_back(BitString::parse(p.get<std::string>()));
  for (const auto& p : spec.pointers)
    if (p.width != spec.width) throw parse_error("pointer width mismatch", 0);
  if (j.contains("table")) {
    spec.has_table = true;
    for (const auto& row : j["table"]) {
      std::vector<Rat> r;
      for (const auto& cell : row) r.push_back(rat_from_json(cell));
      spec.table.push_back(std::move(r));
    }
  }
  return spec;
}

// ---- Diagram build requests and reports ----

struct DiagramSpec {
  int width = 1;
  std::vector<BitString> pointers;
  std::vector<CoreGroup> groups;      // empty: one group per pointer over all positions
  std::vector<std::uint32_t> frame;   // empty: identity
  bool separate_top = false;
};

inline DiagramSpec diagram_spec_from_json(const Json& j) {
  DiagramSpec spec;
  spec.width = json_field(j, "width").get<int>();
  for (const auto& p : json_field(j, "pointers"))
    spec.pointers.push_back(BitString::parse(p.get<std::string>()));
  if (j.contains("groups"))
    for (const auto& g : j["groups"]) {
      CoreGroup cg;
      cg.pointer = g.contains("pointer") ? g["pointer"].get<int>()
                                         : static_cast<int>(spec.groups.size());
      cg.positions = json_field(g, "positions").get<std::vector<int>>();
      spec.groups.push_back(std::move(cg));
    }
  if (j.contains("frame")) spec.frame = j["frame"].get<std::vector<std::uint32_t>>();
  if (j.contains("separate_top")) spec.separate_top = j["separate_top"].get<bool>();
  return spec;
}

inline CCCDiagram build_from_spec(const DiagramSpec& spec) {
  std::vector<CoreGroup> groups = spec.groups;
  if (groups.empty())
    for (std::size_t k = 0; k < spec.pointers.size(); ++k) {
      CoreGroup g;
      g.pointer = static_cast<int>(k);
      for (int i = 0; i < spec.width; ++i) g.positions.push_back(i);
      groups.push_back(std::move(g));
    }
  return build_diagram(spec.width, spec.pointers, groups, spec.frame, spec.separate_top);
}

inline Json diagram_to_json(const CCCDiagram& d) {
  Json nodes = Json::array();
  for (const auto& n : d.nodes)
    nodes.push_back(Json{{"id", n.cls.id},
                         {"role", role_name(n.role)},
                         {"position", n.position},
                         {"group", n.group},
                         {"tokens", n.cls.tokens.size()},
                         {"types", n.cls.types}});
  Json edges = Json::array();
  for (const auto& e : d.edges)
    edges.push_back(Json{{"name", e.name},
                         {"src", d.nodes[static_cast<std::size_t>(e.src)].cls.id},
                         {"dst", d.nodes[static_cast<std::size_t>(e.dst)].cls.id},
                         {"cone", e.cone}});
  Json pointers = Json::array();
  for (const auto& p : d.pointers) pointers.push_back(p.str());
  Json groups = Json::array();
  for (const auto& g : d.groups) {
    Json pos = Json::array();
    for (int i : g.positions) pos.push_back(i);
    groups.push_back(Json{{"pointer", g.pointer}, {"positions", pos}});
  }
  return Json{{"width", d.width},
              {"nodes", nodes},
              {"edges", edges},
              {"pointers", pointers},
              {"groups", groups},
              {"frame", d.frame}};
}

inline std::string diagram_to_dot(const CCCDiagram& d) {
  std::ostringstream out;
  out << "digraph cccd {\n  rankdir=BT;\n";
  for (const auto& n : d.nodes) {
    const char* shape = n.role == Role::Base ? "box"
                        : n.role == Role::ComponentCore ? "ellipse"
                                                        : "doubleoctagon";
    out << "  \"" << n.cls.id << "\" [shape=" << shape << "];\n";
  }
  for (const auto& e : d.edges) {
    out << "  \"" << d.nodes[static_cast<std::size_t>(e.src)].cls.id << "\" -> \""
        << d.nodes[static_cast<std::size_t>(e.dst)].cls.id << "\" [label=\"" << e.name << "\"";
    if (e.cone) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

inline Json commute_report_to_json(const CommuteReport& r) {
  Json j{{"commutes", r.ok}};
  if (!r.ok && r.witness) {
    const auto& w = *r.witness;
    j["witness"] = Json{{"path_a", w.path_a}, {"path_b", w.path_b}, {"side", w.side},
                        {"at", w.at},         {"lhs", w.lhs},       {"rhs", w.rhs}};
  }
  return j;
}

// ---- Quivers ----

inline QuiverRep quiver_rep_from_json(const Json& j) {
  QuiverRep rep;
  const Json& verts = json_field(j, "vertices");
  if (verts.is_number_integer()) {
    for (int v = 0; v < verts.get<int>(); ++v)
      rep.quiver.vertices.push_back("v" + std::to_string(v));
  } else {
    rep.quiver.vertices = verts.get<std::vector<std::string>>();
  }
  rep.dims = json_field(j, "dims").get<std::vector<int>>();
  for (const auto& e : json_field(j, "edges")) {
    QuiverEdge edge;
    edge.src = json_field(e, "src").get<int>();
    edge.dst = json_field(e, "dst").get<int>();
    if (e.contains("label")) edge.label = e["label"].get<std::string>();
    rep.quiver.edges.push_back(edge);
    const Json& mat = json_field(e, "mat");
    RatMat m;
    m.rows = static_cast<int>(mat.size());
    m.cols = m.rows > 0 ? static_cast<int>(mat[0].size()) : 0;
    for (const auto& row : mat) {
      if (static_cast<int>(row.size()) != m.cols) throw parse_error("ragged matrix rows", 0);
      for (const auto& cell : row) m.a.push_back(rat_from_json(cell));
    }
    rep.mats.push_back(std::move(m));
  }
  rep.validate();
  return rep;
}

inline Json rat_vector_to_json(const std::vector<Rat>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(rat_to_json(r));
  return out;
}

inline Json rat_mat_to_json(const RatMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows; ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(rat_to_json(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

// ---- Cobordisms ----

inline Cobordism cobordism_from_json(const Json& j) {
  Cobordism c;
  if (j.contains("slots")) {
    std::vector<int> all;
    for (int i = 0; i < j["slots"].get<int>(); ++i) all.push_back(i);
    c.source.push_back(make_sector(all));
  } else {
    for (const auto& s : json_field(j, "source"))
      c.source.push_back(make_sector(s.get<std::vector<int>>()));
  }
  for (const auto& g : json_field(j, "word")) {
    std::string kind = json_field(g, "gen").get<std::string>();
    Generator gen;
    if (kind == "cylinder") {
      gen.kind = GenKind::Cylinder;
    } else if (kind == "pants") {
      gen.kind = GenKind::Pants;
      gen.at = json_field(g, "at").get<int>();
    } else if (kind == "copants") {
      gen.kind = GenKind::Copants;
      gen.at = json_field(g, "at").get<int>();
      gen.split = json_field(g, "split").get<int>();
    } else if (kind == "rotate") {
      gen.kind = GenKind::Rotate;
      gen.at = json_field(g, "at").get<int>();
      gen.rho = json_field(g, "rho").get<std::vector<std::uint32_t>>();
    } else {
      throw parse_error("unknown generator: " + kind, 0);
    }
    c.word.push_back(std::move(gen));
  }
  return c;
}

inline Json boundary_to_json(const Boundary& b) {
  Json out = Json::array();
  for (const auto& s : b) out.push_back(s.name);
  return out;
}

inline Json generator_to_json(const Generator& g) {
  Json j{{"gen", gen_name(g.kind)}};
  if (g.kind != GenKind::Cylinder) j["at"] = g.at;
  if (g.kind == GenKind::Copants) j["split"] = g.split;
  if (g.kind == GenKind::Rotate) j["rho"] = g.rho;
  return j;
}

inline Json cobordism_to_json(const Cobordism& c) {
  Json word = Json::array();
  for (const auto& g : c.word) word.push_back(generator_to_json(g));
  return Json{{"source", boundary_to_json(c.source)}, {"word", word}};
}

// One-line cycle notation; fixed points omitted; identity prints as "()".
inline std::string cycles_str(const std::vector<std::uint32_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  std::ostringstream out;
  bool any = false;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i] || perm[i] == i) continue;
    out << "(";
    std::size_t j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = true;
      if (!first) out << " ";
      out << j;
      first = false;
      j = perm[j];
    }
    out << ")";
    any = true;
  }
  return any ? out.str() : "()";
}

inline Json tqft_map_to_json(const TQFTMap& m) {
  return Json{{"width", m.width}, {"perm", m.perm}, {"cycles", cycles_str(m.perm)}};
}

// ---- TQNN graphs, faces, images ----

inline TqnnGraph graph_from_json(const Json& j) {
  TqnnGraph g;
  g.n_nodes = json_field(j, "nodes").get<int>();
  for (const auto& l : json_field(j, "links")) {
    GraphLink link;
    link.src = json_field(l, "src").get<int>();
    link.dst = json_field(l, "dst").get<int>();
    if (l.contains("label")) link.label = l["label"].get<std::string>();
    g.links.push_back(link);
  }
  validate_graph(g);
  return g;
}

inline std::vector<Face> faces_from_json(const Json& j) {
  std::vector<Face> faces;
  for (const auto& f : j) {
    Face face;
    for (const auto& s : f) {
      PathStep step;
      step.link = json_field(s, "link").get<int>();
      if (s.contains("reverse")) step.reverse = s["reverse"].get<bool>();
      face.push_back(step);
    }
    faces.push_back(std::move(face));
  }
  return faces;
}

inline Json graph_to_json(const TqnnGraph& g) {
  Json links = Json::array();
  for (const auto& l : g.links)
    links.push_back(Json{{"src", l.src}, {"dst", l.dst}, {"label", l.label}});
  return Json{{"nodes", g.n_nodes}, {"links", links}};
}

// Accepts either a plain grid of integers or a P2 portable greymap whose
// maxval must be exactly 10.
inline TQNNImage image_from_text(const std::string& text) {
  // Strip '#' comments, then tokenize.
  std::string clean;
  bool comment = false;
  for (char ch : text) {
    if (ch == '#') comment = true;
    if (ch == '\n') comment = false;
    clean += comment ? ' ' : ch;
  }
  std::istringstream in(clean);
  std::string first;
  if (!(in >> first)) throw parse_error("empty image file", 0);
  TQNNImage img;
  if (first == "P2") {
    int maxval = 0;
    if (!(in >> img.width >> img.height >> maxval)) throw parse_error("truncated greymap header", 0);
    if (maxval != 10) throw parse_error("greymap maxval must be exactly 10", 0);
    int v;
    while (in >> v) img.grey.push_back(v);
  } else {
    // Plain grid: row per line. Re-scan line by line to learn the width.
    std::istringstream lines(clean);
    std::string line;
    int width = -1;
    while (std::getline(lines, line)) {
      std::istringstream row(line);
      std::vector<int> vals;
      int v;
      while (row >> v) vals.push_back(v);
      if (vals.empty()) continue;
      if (width < 0) width = static_cast<int>(vals.size());
      else if (static_cast<int>(vals.size()) != width) throw parse_error("ragged image rows", 0);
      for (int x : vals) img.grey.push_back(x);
      ++img.height;
    }
    img.width = width < 0 ? 0 : width;
  }
  try {
    validate_image(img);
  } catch (const input_error& e) {
    throw parse_error(e.what(), 0);
  }
  return img;
}

inline Json image_to_json(const TQNNImage& img) {
  Json rows = Json::array();
  for (int r = 0; r < img.height; ++r) {
    Json row = Json::array();
    for (int c = 0; c < img.width; ++c) row.push_back(img.at(r, c));
    rows.push_back(row);
  }
  return Json{{"height", img.height}, {"width", img.width}, {"grid", rows}};
}

}  // namespace qrflow
