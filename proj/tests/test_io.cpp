#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "qrflow/io.hpp"

using namespace qrflow;

namespace {

Classifier tiny(const std::string& id, std::vector<std::string> tokens,
                std::vector<std::string> types, std::vector<std::string> rows) {
  Classifier c;
  c.id = id;
  c.tokens = std::move(tokens);
  c.types = std::move(types);
  for (const auto& row : rows) {
    std::vector<bool> bits;
    for (char ch : row) bits.push_back(ch == '1');
    c.rel.push_back(bits);
  }
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("rational serialization") {
  for (const Rat& r : {Rat(3, 4), Rat(-5), Rat(0), Rat(22, 7), Rat(-9, 8)})
    CHECK(rat_from_json(rat_to_json(r)) == r);
  CHECK(rat_to_json(Rat(3, 4)).get<std::string>() == "3/4");
  CHECK(rat_to_json(Rat(-5)).get<std::string>() == "-5");
  CHECK(rat_from_json(Json(7)) == Rat(7));
  CHECK_THROWS_AS(rat_from_json(Json("1/0")), parse_error);
  CHECK_THROWS_AS(rat_from_json(Json(1.5)), parse_error);
}

TEST_CASE("classifier round trip") {
  auto c = tiny("demo", {"t0", "t1", "t2"}, {"a", "b"}, {"10", "11", "01"});
  SECTION("emit then parse is the identity") {
    auto back = classifier_from_json(classifier_to_json(c));
    CHECK(back == c);
    CHECK(back.id == "demo");
  }
  SECTION("malformed tables are rejected") {
    Json j = classifier_to_json(c);
    j["rel"] = Json::array({"10", "11"});
    CHECK_THROWS_AS(classifier_from_json(j), parse_error);
    j = classifier_to_json(c);
    j["rel"][1] = "1";
    CHECK_THROWS_AS(classifier_from_json(j), parse_error);
    j = classifier_to_json(c);
    j["rel"][0] = "1x";
    CHECK_THROWS_AS(classifier_from_json(j), parse_error);
    j = classifier_to_json(c);
    j.erase("tokens");
    try {
      classifier_from_json(j);
      FAIL("expected a parse error");
    } catch (const parse_error& e) {
      CHECK(std::string(e.what()).find("missing field") != std::string::npos);
    }
  }
  SECTION("duplicate labels fail classifier validation") {
    Json j = classifier_to_json(c);
    j["types"] = Json::array({"a", "a"});
    CHECK_THROWS_AS(classifier_from_json(j), parse_error);
  }
}

TEST_CASE("infomorphism round trip") {
  auto src = tiny("src", {"s0", "s1"}, {"a"}, {"1", "0"});
  auto dst = tiny("dst", {"d0"}, {"b"}, {"1"});
  Infomorphism f(src, dst, {0}, {0});
  SECTION("emit then parse preserves both maps") {
    auto back = infomorphism_from_json(infomorphism_to_json(f));
    CHECK(back.src == f.src);
    CHECK(back.dst == f.dst);
    CHECK(back.tok_map == f.tok_map);
    CHECK(back.typ_map == f.typ_map);
  }
  SECTION("adjointness violations surface on parse") {
    Json j = infomorphism_to_json(f);
    j["tokMap"]["d0"] = "s1";  // now lhs false but rhs true
    CHECK_THROWS_AS(infomorphism_from_json(j), structure_error);
  }
  SECTION("unknown labels are parse errors") {
    Json j = infomorphism_to_json(f);
    j["tokMap"] = Json{{"d0", "nope"}};
    CHECK_THROWS_AS(infomorphism_from_json(j), parse_error);
  }
}

TEST_CASE("qrf spec files") {
  Json j{{"width", 3}, {"pointers", Json::array({"101", "010"})}};
  auto spec = qrf_spec_from_json(j);
  CHECK(spec.width == 3);
  REQUIRE(spec.pointers.size() == 2);
  CHECK(spec.pointers[0] == BitString::parse("101"));
  CHECK_FALSE(spec.has_table);

  j["table"] = Json::array({Json::array({"1/2", "1/2"}), Json::array({"1/4", "1/4"}),
                            Json::array({"1/4", "1/4"})});
  spec = qrf_spec_from_json(j);
  CHECK(spec.has_table);
  CHECK(spec.table[0][0] == Rat(1, 2));

  Json bad{{"width", 3}, {"pointers", Json::array({"10"})}};
  CHECK_THROWS_AS(qrf_spec_from_json(bad), parse_error);
}

TEST_CASE("diagram emission") {
  auto d = build_elementary(2, BitString::parse("10"));
  SECTION("structure survives the json view") {
    Json j = diagram_to_json(d);
    CHECK(j["width"] == 2);
    CHECK(j["nodes"].size() == 3);
    CHECK(j["edges"].size() == 4);
    CHECK(j["pointers"] == Json::array({"10"}));
  }
  SECTION("build specs reconstruct the same diagram") {
    Json j{{"width", 2}, {"pointers", Json::array({"10"})}};
    auto built = build_from_spec(diagram_spec_from_json(j));
    CHECK(diagrams_equal(built, d));
  }
  SECTION("build specs accept explicit groups and frames") {
    Json j{{"width", 2},
           {"pointers", Json::array({"10"})},
           {"groups", Json::array({Json{{"positions", Json::array({0, 1})}}})},
           {"frame", Json::array({0, 1, 2, 3})},
           {"separate_top", false}};
    auto built = build_from_spec(diagram_spec_from_json(j));
    CHECK(built.frame == std::vector<std::uint32_t>{0, 1, 2, 3});
    CHECK(cccd_to_qrf(built).pointers == cccd_to_qrf(d).pointers);
  }
  SECTION("dot output names every node and edge") {
    std::string dot = diagram_to_dot(d);
    CHECK(dot.find("digraph cccd") != std::string::npos);
    CHECK(dot.find("\"base.p0\" [shape=box];") != std::string::npos);
    CHECK(dot.find("\"core\" [shape=doubleoctagon];") != std::string::npos);
    CHECK(dot.find("\"base.p0\" -> \"core\"") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
  }
}

TEST_CASE("commute reports") {
  auto x = build_elementary(3, BitString::parse("101"));
  SECTION("a commuting diagram reports cleanly") {
    Json j = commute_report_to_json(check_commutes(x));
    CHECK(j["commutes"] == true);
    CHECK_FALSE(j.contains("witness"));
  }
  SECTION("a failing joint carries its witness") {
    auto y = basis_rotation(x, 1, {0, 2, 1, 3}).target;
    auto joint = assemble_joint(x, y);
    auto rep = check_commutes(joint);
    REQUIRE_FALSE(rep.ok);
    Json j = commute_report_to_json(rep);
    CHECK(j["commutes"] == false);
    REQUIRE(j.contains("witness"));
    CHECK(j["witness"]["lhs"] != j["witness"]["rhs"]);
    CHECK_FALSE(j["witness"]["path_a"].empty());
  }
}

TEST_CASE("quiver parsing") {
  Json j{{"vertices", 2},
         {"dims", Json::array({2, 2})},
         {"edges", Json::array({Json{{"src", 0},
                                     {"dst", 1},
                                     {"mat", Json::array({Json::array({"1", "0"}),
                                                          Json::array({"0", "1"})})}}})}};
  auto rep = quiver_rep_from_json(j);
  CHECK(rep.quiver.vertices == std::vector<std::string>{"v0", "v1"});
  CHECK(rep.dims == std::vector<int>{2, 2});
  REQUIRE(rep.mats.size() == 1);
  CHECK(rep.mats[0].at(0, 0) == Rat(1));

  SECTION("vertex lists name the vertices") {
    j["vertices"] = Json::array({"left", "right"});
    CHECK(quiver_rep_from_json(j).quiver.vertices ==
          std::vector<std::string>{"left", "right"});
  }
  SECTION("ragged matrices are parse errors") {
    j["edges"][0]["mat"] = Json::array({Json::array({"1", "0"}), Json::array({"0"})});
    CHECK_THROWS_AS(quiver_rep_from_json(j), parse_error);
  }
}

TEST_CASE("cobordism parsing") {
  SECTION("a single merged register source") {
    Json j{{"slots", 4},
           {"word", Json::array({Json{{"gen", "copants"}, {"at", 0}, {"split", 2}},
                                 Json{{"gen", "pants"}, {"at", 0}}})}};
    auto c = cobordism_from_json(j);
    REQUIRE(c.source.size() == 1);
    CHECK(c.source[0].name == "q0-3");
    REQUIRE(c.word.size() == 2);
    CHECK(c.word[0].kind == GenKind::Copants);
    CHECK(c.word[0].split == 2);
    CHECK(c.word[1].kind == GenKind::Pants);
    CHECK(boundary_equal(cobordism_target(c), c.source));
  }
  SECTION("explicit sector lists and rotations") {
    Json j{{"source", Json::array({Json::array({0, 1}), Json::array({2, 3})})},
           {"word", Json::array({Json{{"gen", "rotate"},
                                      {"at", 1},
                                      {"rho", Json::array({0, 2, 1, 3})}}})}};
    auto c = cobordism_from_json(j);
    REQUIRE(c.source.size() == 2);
    CHECK(c.word[0].rho == std::vector<std::uint32_t>{0, 2, 1, 3});
  }
  SECTION("emitted words re-parse to the same word") {
    Cobordism c;
    c.source = {make_sector({0, 1, 2, 3})};
    Generator split;
    split.kind = GenKind::Copants;
    split.split = 2;
    Generator merge;
    merge.kind = GenKind::Pants;
    c.word = {split, merge};
    Json j{{"slots", 4}, {"word", cobordism_to_json(c)["word"]}};
    auto back = cobordism_from_json(j);
    REQUIRE(back.word.size() == 2);
    CHECK(back.word[0].kind == GenKind::Copants);
    CHECK(back.word[0].split == 2);
    CHECK(back.word[1].kind == GenKind::Pants);
  }
  SECTION("unknown generators are parse errors") {
    Json j{{"slots", 2}, {"word", Json::array({Json{{"gen", "saddle"}}})}};
    CHECK_THROWS_AS(cobordism_from_json(j), parse_error);
  }
}

TEST_CASE("cycle notation") {
  CHECK(cycles_str({0, 1, 2, 3}) == "()");
  CHECK(cycles_str({1, 0, 3, 2}) == "(0 1)(2 3)");
  CHECK(cycles_str({1, 2, 3, 0}) == "(0 1 2 3)");
  CHECK(cycles_str({0, 2, 1, 3}) == "(1 2)");
  Json j = tqft_map_to_json(tqft_identity(2));
  CHECK(j["width"] == 2);
  CHECK(j["cycles"] == "()");
  CHECK(j["perm"].size() == 4);
}

TEST_CASE("graph and face parsing") {
  Json j{{"nodes", 2},
         {"links", Json::array({Json{{"src", 0}, {"dst", 1}, {"label", "x"}},
                                Json{{"src", 1}, {"dst", 0}}})}};
  auto g = graph_from_json(j);
  CHECK(g.n_nodes == 2);
  REQUIRE(g.links.size() == 2);
  CHECK(g.links[0].label == "x");

  auto back = graph_from_json(graph_to_json(g));
  CHECK(back.n_nodes == g.n_nodes);
  REQUIRE(back.links.size() == g.links.size());
  for (std::size_t i = 0; i < g.links.size(); ++i) {
    CHECK(back.links[i].src == g.links[i].src);
    CHECK(back.links[i].dst == g.links[i].dst);
  }

  j["links"][0]["dst"] = 5;
  CHECK_THROWS_AS(graph_from_json(j), input_error);

  auto faces = faces_from_json(parse_json(R"([[{"link":0},{"link":1}],
                                              [{"link":0,"reverse":true}]])"));
  REQUIRE(faces.size() == 2);
  CHECK(faces[0].size() == 2);
  CHECK_FALSE(faces[0][0].reverse);
  CHECK(faces[1][0].reverse);
}

TEST_CASE("image parsing") {
  SECTION("portable greymaps with the exact level count") {
    auto img = image_from_text("P2\n2 2\n10\n10 4 0 7\n");
    CHECK(img.height == 2);
    CHECK(img.width == 2);
    CHECK(img.grey == std::vector<int>{10, 4, 0, 7});
  }
  SECTION("comments are stripped") {
    auto img = image_from_text("P2 # tiny\n2 1\n10 # levels\n5 5\n");
    CHECK(img.height == 1);
    CHECK(img.width == 2);
  }
  SECTION("wrong maxval is rejected") {
    CHECK_THROWS_AS(image_from_text("P2\n1 1\n255\n0\n"), parse_error);
  }
  SECTION("plain grids") {
    auto img = image_from_text("1 2\n3 4\n");
    CHECK(img.height == 2);
    CHECK(img.width == 2);
    CHECK(img.at(1, 0) == 3);
    CHECK_THROWS_AS(image_from_text("1 2\n3\n"), parse_error);
    CHECK_THROWS_AS(image_from_text("1 11\n"), parse_error);
    CHECK_THROWS_AS(image_from_text("   \n"), parse_error);
  }
  SECTION("grid emission") {
    TQNNImage img;
    img.height = 1;
    img.width = 2;
    img.grey = {3, 7};
    Json j = image_to_json(img);
    CHECK(j["grid"] == Json::array({Json::array({3, 7})}));
  }
}

TEST_CASE("parse errors carry byte positions") {
  try {
    parse_json("{\"a\" 1}");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.position > 0);
  }
  CHECK_THROWS_AS(read_text_file("/nonexistent/qrflow-test-file"), parse_error);
}
