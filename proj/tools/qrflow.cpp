// Command-line front end: one subcommand per module, JSON as the canonical
// output format, exit 0 on success, 1 on domain failures (machine-readable
// error object), 2 on I/O and parse problems.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrflow/charclass.hpp"
#include "qrflow/io.hpp"
#include "qrflow/quiver.hpp"
#include "qrflow/tqnn.hpp"

using namespace qrflow;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240801;
constexpr std::uint64_t kCliTableBound = 1000000;

struct Options {
  std::string format = "json";
  std::uint64_t seed = kDefaultSeed;
};

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

void emit_text(const std::string& s) { std::cout << s << "\n"; }

std::vector<std::uint32_t> parse_perm_csv(const std::string& csv) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw input_error("empty entry in permutation list");
    for (char c : item)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw input_error("permutation entries must be nonnegative integers");
    out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  if (out.empty()) throw input_error("permutation list is empty");
  return out;
}

std::vector<int> parse_int_csv(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

Json diagram_summary(const CCCDiagram& d) {
  Json pointers = Json::array();
  for (const auto& p : d.pointers) pointers.push_back(p.str());
  return Json{{"width", d.width},
              {"nodes", d.nodes.size()},
              {"edges", d.edges.size()},
              {"pointers", pointers}};
}

Json square_to_json(const SquareReport& r) {
  Json j{{"ok", r.ok}};
  if (r.witness) j["witness"] = *r.witness;
  return j;
}

Json stages_to_json(const std::vector<Boundary>& stages) {
  Json out = Json::array();
  for (const auto& b : stages) out.push_back(boundary_to_json(b));
  return out;
}

Json cyc_value_json(const Cyc& v) {
  auto [re, im] = cyc_approx(v);
  Json j{{"exact", cyc_to_json(v)}};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12Lg", re);
  j["re"] = std::string(buf);
  std::snprintf(buf, sizeof(buf), "%.12Lg", im);
  j["im"] = std::string(buf);
  return j;
}

// The CLI refuses dense state tables past a million entries; the library cap
// is looser, but interactive use should fail fast with the bound in the text.
void enforce_table_bound(const FiniteGroup& g, std::size_t links) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < links; ++i) {
    total *= static_cast<std::uint64_t>(g.order);
    if (total > kCliTableBound)
      throw input_error("state table size " + g.name + "^" + std::to_string(links) +
                        " exceeds the CLI bound of " + std::to_string(kCliTableBound) +
                        " entries");
  }
}

// ---- qrf ----

QrfSpec load_qrf_spec(const std::string& path) {
  return qrf_spec_from_json(parse_json(read_text_file(path)));
}

int cmd_qrf_measure(const Options& opt, const std::string& spec_path, const std::string& input,
                    int column) {
  auto spec = load_qrf_spec(spec_path);
  if (spec.has_table) {
    if (column < 0) throw input_error("probabilistic machines measure by --column");
    ProbabilisticQRF q(spec.width, spec.pointers, spec.table);
    auto dist = q.measure_distribution(column);
    Json rows = Json::array();
    for (std::size_t i = 0; i < dist.size(); ++i)
      rows.push_back(Json{{"candidate", q.candidates[i].str()}, {"p", rat_str(dist[i])}});
    Json out{{"column", column}, {"distribution", rows}};
    if (opt.format == "text") {
      std::ostringstream s;
      for (std::size_t i = 0; i < dist.size(); ++i)
        s << (i ? "\n" : "") << q.candidates[i].str() << " " << rat_str(dist[i]);
      emit_text(s.str());
    } else {
      emit(out);
    }
    return 0;
  }
  if (input.empty()) throw input_error("deterministic machines measure by --input");
  CompositeQRF q(spec.width, spec.pointers);
  auto m = q.measure(BitString::parse(input));
  if (opt.format == "text") {
    std::ostringstream s;
    for (std::size_t i = 0; i < m.one_hot.size(); ++i) s << m.one_hot[i];
    emit_text(s.str());
    return 0;
  }
  Json out{{"input", input}, {"one_hot", m.one_hot}};
  if (m.member) out["member"] = *m.member;
  emit(out);
  return 0;
}

int cmd_qrf_prepare(const Options& opt, const std::string& spec_path, int outcome,
                    const std::string& target) {
  auto spec = load_qrf_spec(spec_path);
  if (spec.has_table) throw input_error("probabilistic machines do not prepare");
  BitString prepared(1, 0);
  if (spec.pointers.size() == 1) {
    ElementaryQRF q{spec.width, spec.pointers[0]};
    std::optional<BitString> tgt;
    if (!target.empty()) tgt = BitString::parse(target);
    prepared = q.prepare(outcome, tgt);
  } else {
    if (outcome < 0 || outcome >= static_cast<int>(spec.pointers.size()))
      throw input_error("outcome must name a member of the composite machine");
    prepared = spec.pointers[static_cast<std::size_t>(outcome)];
  }
  if (opt.format == "text") {
    emit_text(prepared.str());
  } else {
    emit(Json{{"outcome", outcome}, {"prepared", prepared.str()}});
  }
  return 0;
}

int cmd_qrf_sample(const Options& opt, const std::string& spec_path, int column, int count) {
  auto spec = load_qrf_spec(spec_path);
  if (!spec.has_table) throw input_error("sampling requires a probability table");
  ProbabilisticQRF q(spec.width, spec.pointers, spec.table);
  auto draws = q.sample(column, opt.seed, count);
  if (opt.format == "text") {
    std::ostringstream s;
    for (std::size_t i = 0; i < draws.size(); ++i) s << (i ? " " : "") << draws[i];
    emit_text(s.str());
    return 0;
  }
  emit(Json{{"column", column}, {"seed", opt.seed}, {"samples", draws}});
  return 0;
}

// ---- cccd ----

CCCDiagram load_diagram(const std::string& path) {
  return build_from_spec(diagram_spec_from_json(parse_json(read_text_file(path))));
}

int cmd_cccd_build(const Options& opt, const std::string& spec_path) {
  auto d = load_diagram(spec_path);
  if (opt.format == "dot") {
    std::cout << diagram_to_dot(d);
    return 0;
  }
  if (opt.format == "text") {
    auto chk = validate_diagram(d);
    std::ostringstream s;
    s << "width " << d.width << ", " << d.nodes.size() << " nodes, " << d.edges.size()
      << " edges, " << (chk.ok ? "valid" : "INVALID");
    emit_text(s.str());
    return 0;
  }
  emit(diagram_to_json(d));
  return 0;
}

int cmd_cccd_check(const Options&, const std::string& spec_path, int rotate_prefix,
                   const std::string& rho_csv) {
  auto d = load_diagram(spec_path);
  if (rotate_prefix > 0) {
    // The clashing-joint configuration: the same machine read in two bases,
    // glued along identity cross arrows.
    auto rot = basis_rotation(d, rotate_prefix, parse_perm_csv(rho_csv));
    auto joint = assemble_joint(d, rot.target);
    auto rep = check_commutes(joint);
    emit(commute_report_to_json(rep));
    return rep.ok ? 0 : 1;
  }
  auto chk = validate_diagram(d);
  Json bad = Json::array();
  for (const auto& be : chk.bad_edges) bad.push_back(be.edge);
  Json out{{"valid", chk.ok},
           {"shape_ok", chk.shape_ok},
           {"bad_edges", bad},
           {"commutes", commute_report_to_json(chk.commute)}};
  if (!chk.shape_ok) out["shape_message"] = chk.shape_message;
  emit(out);
  return chk.ok ? 0 : 1;
}

DiagramMorphism make_morphism(const CCCDiagram& d, const std::string& op, int split,
                              int prefix, const std::string& rho_csv) {
  if (op == "identity") return identity_morphism(d);
  if (op == "fission") return fission(d, split);
  if (op == "rotation") {
    if (rho_csv.empty()) throw input_error("rotation needs --rho");
    return basis_rotation(d, prefix, parse_perm_csv(rho_csv));
  }
  throw input_error("unknown morphism op: " + op);
}

Json morphism_trace(const DiagramMorphism& m) {
  auto cob = functor_F(m);
  auto stages = type_check(cob);
  auto eval = tqft_eval(cob);
  auto square = commuting_square_report(m, cob);
  return Json{{"source", diagram_summary(m.source)},
              {"target", diagram_summary(m.target)},
              {"cobordism", cobordism_to_json(cob)},
              {"stages", stages_to_json(stages)},
              {"evaluation", tqft_map_to_json(eval)},
              {"square", square_to_json(square)}};
}

int cmd_cccd_morph(const Options&, const std::string& spec_path, const std::string& op,
                   int split, int prefix, const std::string& rho_csv) {
  auto d = load_diagram(spec_path);
  auto m = make_morphism(d, op, split, prefix, rho_csv);
  Json out = morphism_trace(m);
  out["op"] = op;
  emit(out);
  return 0;
}

// ---- quiver ----

int cmd_quiver_sections(const Options& opt, const std::string& path) {
  auto rep = quiver_rep_from_json(parse_json(read_text_file(path)));
  auto s = sections_basis(rep);
  if (opt.format == "text") {
    emit_text("rank " + std::to_string(s.count()));
    return 0;
  }
  Json basis = Json::array();
  for (int k = 0; k < s.count(); ++k) {
    Json vec = Json::array();
    for (int i = 0; i < s.basis.rows; ++i) vec.push_back(rat_str(s.basis.at(i, k)));
    basis.push_back(vec);
  }
  emit(Json{{"rank", s.count()}, {"basis", basis}});
  return 0;
}

int cmd_quiver_obstruction(const Options&, const std::string& path) {
  auto rep = quiver_rep_from_json(parse_json(read_text_file(path)));
  auto report = global_section_obstruction(rep);
  Json rows = Json::array();
  for (const auto& pm : report.mismatches)
    rows.push_back(Json{{"start", pm.start},
                        {"end", pm.end},
                        {"path_a", pm.path_a},
                        {"path_b", pm.path_b},
                        {"difference_rank", pm.difference_rank},
                        {"agreement_dim", pm.agreement_dim}});
  emit(Json{{"obstructed", report.obstructed}, {"mismatches", rows}});
  return 0;
}

int cmd_quiver_context(const Options&, const std::string& x_path, const std::string& y_path,
                       int prefix, const std::string& rho_csv) {
  auto x = load_diagram(x_path);
  CCCDiagram y;
  if (!y_path.empty()) {
    y = load_diagram(y_path);
  } else if (prefix > 0) {
    y = basis_rotation(x, prefix, parse_perm_csv(rho_csv)).target;
  } else {
    throw input_error("context needs --other or --prefix/--rho");
  }
  auto rep = contextuality_dimension(x, y);
  auto cf = contextual_fraction(x, y);
  emit(Json{{"dimension", rep.dimension},
            {"removed", rep.removed},
            {"empty_survivor", rep.empty_survivor},
            {"contextual_fraction", rat_str(cf)},
            {"noncontextual_fraction", rat_str(1 - cf)}});
  return 0;
}

// ---- cobord ----

int cmd_cobord_compile(const Options&, const std::string& path) {
  auto c = cobordism_from_json(parse_json(read_text_file(path)));
  auto stages = type_check(c);
  Json out = cobordism_to_json(c);
  out["stages"] = stages_to_json(stages);
  out["target"] = boundary_to_json(stages.back());
  emit(out);
  return 0;
}

int cmd_cobord_eval(const Options& opt, const std::string& path) {
  auto c = cobordism_from_json(parse_json(read_text_file(path)));
  auto eval = tqft_eval(c);
  if (opt.format == "text") {
    emit_text(cycles_str(eval.perm));
    return 0;
  }
  emit(tqft_map_to_json(eval));
  return 0;
}

int cmd_cobord_check(const Options&, const std::string& spec_path, const std::string& op,
                     int split, int prefix, const std::string& rho_csv) {
  auto d = load_diagram(spec_path);
  auto m = make_morphism(d, op, split, prefix, rho_csv);
  auto square = commuting_square_report(m);
  emit(square_to_json(square));
  return square.ok ? 0 : 1;
}

// ---- tqnn ----

int cmd_tqnn_encode(const Options& opt, const std::string& image_path) {
  auto img = image_from_text(read_text_file(image_path));
  auto enc = image_to_tqnn(img);
  auto su2 = su2_labels(enc);
  auto faces = lattice_faces(img.height, img.width);
  if (opt.format == "dot") {
    std::ostringstream s;
    s << "digraph tqnn {\n";
    for (std::size_t i = 0; i < enc.graph.links.size(); ++i)
      s << "  n" << enc.graph.links[i].src << " -> n" << enc.graph.links[i].dst
        << " [label=\"" << enc.weight[i] << "\"];\n";
    s << "}\n";
    std::cout << s.str();
    return 0;
  }
  Json weights = Json::array();
  Json spins = Json::array();
  for (std::size_t i = 0; i < enc.weight.size(); ++i) {
    weights.push_back(enc.weight[i]);
    spins.push_back(rat_str(su2[i]));
  }
  Json stubs = Json::array();
  for (const auto& [node, side] : enc.stubs) stubs.push_back(Json{{"node", node}, {"side", side}});
  Json fjson = Json::array();
  for (const auto& f : faces) {
    Json steps = Json::array();
    for (const auto& st : f) steps.push_back(Json{{"link", st.link}, {"reverse", st.reverse}});
    fjson.push_back(steps);
  }
  emit(Json{{"image", image_to_json(img)},
            {"graph", graph_to_json(enc.graph)},
            {"weights", weights},
            {"spin_labels", spins},
            {"stubs", stubs},
            {"faces", fjson}});
  return 0;
}

int cmd_tqnn_amplitude(const Options&, const std::string& group_name,
                       const std::string& graph_path, const std::string& labels_csv,
                       const std::string& faces_path, int delta_power) {
  auto g = group_by_name(group_name);
  auto graph = graph_from_json(parse_json(read_text_file(graph_path)));
  enforce_table_bound(g, graph.links.size());
  auto labels = parse_int_csv(labels_csv);
  auto psi = character_product(g, graph, labels);
  Json out{{"group", g.name}, {"labels", labels}};
  out["kinematic_norm"] = cyc_value_json(kinematic_inner(g, graph, psi, psi));
  if (!faces_path.empty()) {
    auto faces = faces_from_json(parse_json(read_text_file(faces_path)));
    out["physical_norm"] =
        cyc_value_json(physical_inner(g, graph, psi, psi, faces, delta_power));
  }
  emit(out);
  return 0;
}

int cmd_tqnn_partition(const Options& opt, const std::string& group_name,
                       const std::string& graph_path, const std::string& faces_path) {
  auto g = group_by_name(group_name);
  auto graph = graph_from_json(parse_json(read_text_file(graph_path)));
  enforce_table_bound(g, graph.links.size());
  auto faces = faces_from_json(parse_json(read_text_file(faces_path)));
  auto z = partition_function(g, graph, faces);
  if (opt.format == "text") {
    emit_text(rat_str(z));
    return 0;
  }
  emit(Json{{"group", g.name}, {"partition", rat_str(z)}, {"decimal", rat_double(z)}});
  return 0;
}

int cmd_tqnn_classify(const Options&, const std::string& group_name,
                      const std::string& test_path,
                      const std::vector<std::string>& archetype_paths) {
  auto g = group_by_name(group_name);
  auto test = image_from_text(read_text_file(test_path));
  std::vector<TQNNImage> archetypes;
  for (const auto& p : archetype_paths)
    archetypes.push_back(image_from_text(read_text_file(p)));
  auto enc = image_to_tqnn(test);
  enforce_table_bound(g, enc.graph.links.size());
  auto faces = lattice_faces(test.height, test.width);
  auto res = tqnn_classify(g, test, archetypes, faces);
  Json rows = Json::array();
  for (const auto& e : res.ranked) {
    Json row{{"archetype", e.archetype}, {"classifiable", e.classifiable}};
    if (e.classifiable) {
      row["score_num"] = cyc_to_json(e.score_num);
      row["score_den"] = cyc_to_json(e.score_den);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.12Lg", e.score);
      row["score"] = std::string(buf);
      row["exact_unit"] = e.exact_unit();
    }
    rows.push_back(row);
  }
  emit(Json{{"group", g.name}, {"test_degenerate", res.test_degenerate}, {"ranked", rows}});
  return 0;
}

// ---- index ----

int cmd_index(const Options&, const std::vector<std::string>& assignments) {
  std::map<std::string, Rat> vals;
  for (const auto& a : assignments) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw input_error("expected KEY=VALUE, got: " + a);
    std::string key = a.substr(0, eq);
    vals[key] = parse_rat(a.substr(eq + 1));
  }
  auto take = [&](const std::string& k, const Rat& dflt) {
    auto it = vals.find(k);
    if (it == vals.end()) return dflt;
    Rat v = it->second;
    vals.erase(it);
    return v;
  };
  Json out;
  if (vals.count("rank")) {
    Rat rank = take("rank", Rat(0));
    Rat p1 = take("p1", Rat(0));
    Rat c1sq = take("c1sq", Rat(0));
    Rat c2 = take("c2", Rat(0));
    if (!vals.empty()) throw input_error("unknown key: " + vals.begin()->first);
    auto idx = index_bundle(rank, p1, c1sq, c2);
    out = Json{{"mode", "twisted_dirac"},
               {"terms", Json{{"p1_term", rat_str(-rank * p1 / 24)},
                              {"c1_term", rat_str(c1sq / 2)},
                              {"c2_term", rat_str(-c2)}}},
               {"value", rat_str(idx.value)},
               {"integral", idx.integral}};
  } else {
    if (!vals.count("tau")) throw input_error("line-bundle mode needs tau=");
    Rat tau = take("tau", Rat(0));
    Rat c1sq = take("c1sq", Rat(0));
    bool check_p1 = vals.count("p1") > 0;
    Rat p1 = take("p1", Rat(0));
    if (!vals.empty()) throw input_error("unknown key: " + vals.begin()->first);
    auto idx = index_line(tau, c1sq, check_p1, p1);
    out = Json{{"mode", "line_bundle"},
               {"terms", Json{{"tau_term", rat_str(-tau / 8)}, {"c1_term", rat_str(c1sq / 2)}}},
               {"value", rat_str(idx.value)},
               {"integral", idx.integral}};
  }
  emit(out);
  return 0;
}

// ---- demo ----

int cmd_demo_fission(const Options& opt) {
  auto d = build_elementary(4, BitString::parse("1010"));
  auto m = fission(d, 2);
  Json out = morphism_trace(m);
  out["scenario"] = "fission";
  out["split"] = 2;
  out["pointer"] = "1010";
  if (opt.format == "text") {
    emit_text("fission of the width-4 machine at position 2: square " +
              std::string(out["square"]["ok"].get<bool>() ? "ok" : "FAILED"));
    return 0;
  }
  emit(out);
  return 0;
}

int cmd_demo_rotation(const Options& opt) {
  auto d = build_elementary(3, BitString::parse("101"));
  auto m = basis_rotation(d, 1, {0, 2, 1, 3});
  Json out = morphism_trace(m);
  out["scenario"] = "rotation";
  out["prefix"] = 1;
  out["rho"] = Json::array({0, 2, 1, 3});
  out["pointer"] = "101";
  out["pointer_in_new_frame"] = cccd_to_qrf(m.target).pointers[0].str();
  if (opt.format == "text") {
    emit_text("suffix rotation of the width-3 machine: square " +
              std::string(out["square"]["ok"].get<bool>() ? "ok" : "FAILED"));
    return 0;
  }
  emit(out);
  return 0;
}

Json error_json(const std::string& kind, const std::string& message, long long at = -1) {
  Json e{{"kind", kind}, {"message", message}};
  if (at >= 0) e["at"] = at;
  return Json{{"error", e}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact reference-frame, diagram, cobordism and spin-network toolkit"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "Output format: json, text, or dot")
      ->check(CLI::IsMember({"json", "text", "dot"}));
  app.add_option("--seed", opt.seed, "Deterministic sampling seed");

  // qrf
  auto* qrf = app.add_subcommand("qrf", "Measure, prepare, and sample reference frames");
  qrf->require_subcommand(1);
  std::string qrf_spec, qrf_input, qrf_target;
  int qrf_column = -1, qrf_outcome = 1, qrf_count = 1;
  auto* qmeasure = qrf->add_subcommand("measure", "Classify an input string");
  qmeasure->add_option("--spec", qrf_spec, "Machine spec file")->required();
  qmeasure->add_option("--input", qrf_input, "Input bit string");
  qmeasure->add_option("--column", qrf_column, "Input column (probabilistic machines)");
  auto* qprepare = qrf->add_subcommand("prepare", "Prepare a register state");
  qprepare->add_option("--spec", qrf_spec, "Machine spec file")->required();
  qprepare->add_option("--outcome", qrf_outcome, "Measurement outcome to prepare for");
  qprepare->add_option("--target", qrf_target, "Target string for outcome 0");
  auto* qsample = qrf->add_subcommand("sample", "Draw outcomes from a probabilistic machine");
  qsample->add_option("--spec", qrf_spec, "Machine spec file")->required();
  qsample->add_option("--column", qrf_column, "Input column")->required();
  qsample->add_option("--count", qrf_count, "Number of draws");

  // cccd
  auto* cccd = app.add_subcommand("cccd", "Build and check classifier diagrams");
  cccd->require_subcommand(1);
  std::string cccd_spec, cccd_rho;
  int cccd_rotate = 0, cccd_split = 1, cccd_prefix = 1;
  std::string cccd_op = "identity";
  auto* cbuild = cccd->add_subcommand("build", "Build a diagram from a spec");
  cbuild->add_option("--spec", cccd_spec, "Diagram spec file")->required();
  auto* ccheck = cccd->add_subcommand("check", "Validate a diagram, or a two-basis joint");
  ccheck->add_option("--spec", cccd_spec, "Diagram spec file")->required();
  ccheck->add_option("--rotate", cccd_rotate, "Joint check: prefix length of the second basis");
  ccheck->add_option("--rho", cccd_rho, "Joint check: suffix permutation (comma list)");
  auto* cmorph = cccd->add_subcommand("morph", "Apply a morphism and trace its image");
  cmorph->add_option("--spec", cccd_spec, "Diagram spec file")->required();
  cmorph->add_option("--op", cccd_op, "identity, fission, or rotation")->required();
  cmorph->add_option("--split", cccd_split, "Fission split position");
  cmorph->add_option("--prefix", cccd_prefix, "Rotation prefix length");
  cmorph->add_option("--rho", cccd_rho, "Rotation suffix permutation (comma list)");

  // quiver
  auto* quiver = app.add_subcommand("quiver", "Section spaces and contextuality");
  quiver->require_subcommand(1);
  std::string quiver_file, quiver_other, quiver_rho;
  int quiver_prefix = 0;
  auto* qsections = quiver->add_subcommand("sections", "Global section basis of a representation");
  qsections->add_option("--file", quiver_file, "Quiver representation file")->required();
  auto* qobstruction =
      quiver->add_subcommand("obstruction", "Parallel-path mismatch report");
  qobstruction->add_option("--file", quiver_file, "Quiver representation file")->required();
  auto* qcontext = quiver->add_subcommand("context", "Contextuality dimension of two diagrams");
  qcontext->add_option("--spec", quiver_file, "First diagram spec")->required();
  qcontext->add_option("--other", quiver_other, "Second diagram spec");
  qcontext->add_option("--prefix", quiver_prefix, "Derive the second diagram by rotation");
  qcontext->add_option("--rho", quiver_rho, "Rotation suffix permutation (comma list)");

  // cobord
  auto* cobord = app.add_subcommand("cobord", "Compile and evaluate cobordism words");
  cobord->require_subcommand(1);
  std::string cobord_file, cobord_spec, cobord_rho;
  std::string cobord_op = "identity";
  int cobord_split = 1, cobord_prefix = 1;
  auto* ccompile = cobord->add_subcommand("compile", "Type-check a generator word");
  ccompile->add_option("--file", cobord_file, "Cobordism word file")->required();
  auto* ceval = cobord->add_subcommand("eval", "Evaluate the canonical state map");
  ceval->add_option("--file", cobord_file, "Cobordism word file")->required();
  auto* ccheck2 = cobord->add_subcommand("check", "Commuting-square check of a morphism image");
  ccheck2->add_option("--spec", cobord_spec, "Diagram spec file")->required();
  ccheck2->add_option("--op", cobord_op, "identity, fission, or rotation")->required();
  ccheck2->add_option("--split", cobord_split, "Fission split position");
  ccheck2->add_option("--prefix", cobord_prefix, "Rotation prefix length");
  ccheck2->add_option("--rho", cobord_rho, "Rotation suffix permutation (comma list)");

  // tqnn
  auto* tqnn = app.add_subcommand("tqnn", "Spin-network states over finite gauge groups");
  tqnn->require_subcommand(1);
  std::string tq_group = "z2", tq_graph, tq_faces, tq_image, tq_labels, tq_test;
  std::vector<std::string> tq_archetypes;
  int tq_delta = 1;
  auto* tencode = tqnn->add_subcommand("encode", "Encode a greyscale image as a spin network");
  tencode->add_option("--image", tq_image, "Image file (plain grid or P2 greymap)")->required();
  auto* tamplitude = tqnn->add_subcommand("amplitude", "Norms of a character-labeled state");
  tamplitude->add_option("--group", tq_group, "Gauge group (z1..z24, s3)");
  tamplitude->add_option("--graph", tq_graph, "Graph file")->required();
  tamplitude->add_option("--labels", tq_labels, "Character labels, one per link")->required();
  tamplitude->add_option("--faces", tq_faces, "Face file for the physical product");
  tamplitude->add_option("--delta-power", tq_delta, "Flatness delta exponent");
  auto* tclassify = tqnn->add_subcommand("classify", "Rank archetype images by overlap");
  tclassify->add_option("--group", tq_group, "Abelian gauge group");
  tclassify->add_option("--test", tq_test, "Test image file")->required();
  tclassify->add_option("--archetype", tq_archetypes, "Archetype image file (repeatable)")
      ->required();
  auto* tpartition = tqnn->add_subcommand("partition", "Partition function of a decorated graph");
  tpartition->add_option("--group", tq_group, "Gauge group (z1..z24, s3)");
  tpartition->add_option("--graph", tq_graph, "Graph file")->required();
  tpartition->add_option("--faces", tq_faces, "Face file")->required();

  // index
  auto* index = app.add_subcommand("index", "Exact index formulas from named integrals");
  std::vector<std::string> index_args;
  index->add_option("values", index_args, "KEY=VALUE rational assignments")->required();

  // demo
  auto* demo = app.add_subcommand("demo", "Reproducible end-to-end scenarios");
  demo->require_subcommand(1);
  auto* dfission = demo->add_subcommand("fission", "Split a width-4 machine and verify");
  auto* drotation = demo->add_subcommand("rotation", "Rotate a suffix basis and verify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (qmeasure->parsed()) return cmd_qrf_measure(opt, qrf_spec, qrf_input, qrf_column);
    if (qprepare->parsed()) return cmd_qrf_prepare(opt, qrf_spec, qrf_outcome, qrf_target);
    if (qsample->parsed()) return cmd_qrf_sample(opt, qrf_spec, qrf_column, qrf_count);
    if (cbuild->parsed()) return cmd_cccd_build(opt, cccd_spec);
    if (ccheck->parsed()) return cmd_cccd_check(opt, cccd_spec, cccd_rotate, cccd_rho);
    if (cmorph->parsed())
      return cmd_cccd_morph(opt, cccd_spec, cccd_op, cccd_split, cccd_prefix, cccd_rho);
    if (qsections->parsed()) return cmd_quiver_sections(opt, quiver_file);
    if (qobstruction->parsed()) return cmd_quiver_obstruction(opt, quiver_file);
    if (qcontext->parsed())
      return cmd_quiver_context(opt, quiver_file, quiver_other, quiver_prefix, quiver_rho);
    if (ccompile->parsed()) return cmd_cobord_compile(opt, cobord_file);
    if (ceval->parsed()) return cmd_cobord_eval(opt, cobord_file);
    if (ccheck2->parsed())
      return cmd_cobord_check(opt, cobord_spec, cobord_op, cobord_split, cobord_prefix,
                              cobord_rho);
    if (tencode->parsed()) return cmd_tqnn_encode(opt, tq_image);
    if (tamplitude->parsed())
      return cmd_tqnn_amplitude(opt, tq_group, tq_graph, tq_labels, tq_faces, tq_delta);
    if (tclassify->parsed()) return cmd_tqnn_classify(opt, tq_group, tq_test, tq_archetypes);
    if (tpartition->parsed()) return cmd_tqnn_partition(opt, tq_group, tq_graph, tq_faces);
    if (index->parsed()) return cmd_index(opt, index_args);
    if (dfission->parsed()) return cmd_demo_fission(opt);
    if (drotation->parsed()) return cmd_demo_rotation(opt);
    throw input_error("no subcommand dispatched");
  } catch (const parse_error& e) {
    emit(error_json("parse", e.what(), e.position));
    return 2;
  } catch (const input_error& e) {
    emit(error_json("input", e.what()));
    return 1;
  } catch (const structure_error& e) {
    emit(error_json("structure", e.what()));
    return 1;
  } catch (const domain_error& e) {
    emit(error_json("domain", e.what()));
    return 1;
  } catch (const error& e) {
    emit(error_json("error", e.what()));
    return 1;
  } catch (const std::exception& e) {
    emit(error_json("internal", e.what()));
    return 1;
  }
}
