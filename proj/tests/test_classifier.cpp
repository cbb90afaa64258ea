#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qrflow/classifier.hpp"

using namespace qrflow;

namespace {

Classifier three_by_three() {
  // rel rows: t0 = {a0, a1}, t1 = {a1}, t2 = {a0, a2}
  return Classifier("c3", {"t0", "t1", "t2"}, {"a0", "a1", "a2"},
                    {{true, true, false}, {false, true, false}, {true, false, true}});
}

Classifier random_classifier(std::mt19937_64& rng, int max_tok = 5, int max_typ = 4) {
  std::uniform_int_distribution<int> nt(1, max_tok), ny(1, max_typ), bit(0, 1);
  int n_tok = nt(rng), n_typ = ny(rng);
  std::vector<std::string> toks, typs;
  for (int t = 0; t < n_tok; ++t) toks.push_back("t" + std::to_string(t));
  for (int y = 0; y < n_typ; ++y) typs.push_back("a" + std::to_string(y));
  std::vector<std::vector<bool>> rel(static_cast<std::size_t>(n_tok));
  for (auto& row : rel)
    for (int y = 0; y < n_typ; ++y) row.push_back(bit(rng) == 1);
  return Classifier("r", toks, typs, rel);
}

}  // namespace

TEST_CASE("token satisfaction over conjunctions") {
  auto c = three_by_three();
  SECTION("empty set is vacuously satisfied") {
    for (int t = 0; t < 3; ++t) CHECK(token_satisfies(c, t, {}));
  }
  SECTION("singleton matches the relation") {
    CHECK(token_satisfies(c, 0, {0}));
    CHECK_FALSE(token_satisfies(c, 1, {0}));
  }
  SECTION("two types with one failing row") {
    // t0 satisfies a0 and a1; t2 satisfies a0 but not a1.
    CHECK(token_satisfies(c, 0, {0, 1}));
    CHECK_FALSE(token_satisfies(c, 2, {0, 1}));
  }
}

TEST_CASE("infomorphism validation") {
  SECTION("identity maps validate on any classifier") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
      auto c = random_classifier(rng);
      std::vector<int> tok(c.tokens.size()), typ(c.types.size());
      for (std::size_t k = 0; k < tok.size(); ++k) tok[k] = static_cast<int>(k);
      for (std::size_t k = 0; k < typ.size(); ++k) typ[k] = static_cast<int>(k);
      CHECK(validate_infomorphism(c, c, tok, typ).ok);
    }
  }
  SECTION("token swap against an asymmetric relation is flagged") {
    Classifier c("c", {"t0", "t1"}, {"a"}, {{true}, {false}});
    auto rep = validate_infomorphism(c, c, {1, 0}, {0});
    REQUIRE_FALSE(rep.ok);
    CHECK(rep.violations.front() == std::make_pair(0, 0));
  }
  SECTION("composite of validated infomorphisms validates") {
    Classifier a("a", {"x0", "x1"}, {"p"}, {{true}, {false}});
    Classifier b("b", {"y0", "y1"}, {"q", "r"}, {{true, false}, {false, true}});
    // f: a -> b with tok y0->x0, y1->x1; typ p->q.
    Infomorphism f(a, b, {0, 1}, {0});
    Infomorphism g = identity_infomorphism(b);
    auto h = compose(f, g);
    CHECK(validate_infomorphism(h.src, h.dst, h.tok_map, h.typ_map).ok);
  }
}

TEST_CASE("infomorphism composition laws") {
  Classifier a("a", {"x0", "x1"}, {"p"}, {{true}, {false}});
  Classifier b("b", {"y0", "y1"}, {"q", "r"}, {{true, false}, {false, true}});
  Infomorphism f(a, b, {0, 1}, {0});

  SECTION("right identity") {
    auto h = compose(f, identity_infomorphism(b));
    CHECK(h.tok_map == f.tok_map);
    CHECK(h.typ_map == f.typ_map);
  }
  SECTION("left identity") {
    auto h = compose(identity_infomorphism(a), f);
    CHECK(h.tok_map == f.tok_map);
    CHECK(h.typ_map == f.typ_map);
  }
  SECTION("table composition matches hand result") {
    Classifier c("c", {"z0", "z1"}, {"s", "u"}, {{true, false}, {false, true}});
    // g: b -> c swapping tokens; types q->u, r->s keeps adjointness:
    // tok(z0)=y1 satisfies r, z0 satisfies s = typ(r).
    Infomorphism g(b, c, {1, 0}, {1, 0});
    auto h = compose(f, g);
    // tok: z0 -> y1 -> x1, z1 -> y0 -> x0; typ: p -> q -> u.
    CHECK(h.tok_map == std::vector<int>{1, 0});
    CHECK(h.typ_map == std::vector<int>{1});
  }
}

TEST_CASE("sequents") {
  auto c = three_by_three();
  SECTION("reflexivity") {
    CHECK(sequent_holds(c, {{0}, {0}}));
    CHECK(sequent_holds(c, {{0, 1}, {0, 1}}));
  }
  SECTION("unsatisfiable antecedent holds vacuously") {
    // No token satisfies all three types.
    CHECK(sequent_holds(c, {{0, 1, 2}, {1}}));
  }
  SECTION("partial implication fails") {
    // Four tokens: three satisfy M = {a0}, two of those satisfy N = {a1}.
    Classifier c4("c4", {"t0", "t1", "t2", "t3"}, {"a0", "a1"},
                  {{true, true}, {true, true}, {true, false}, {false, false}});
    CHECK_FALSE(sequent_holds(c4, {{0}, {1}}));
  }
}

TEST_CASE("conditional probability by uniform counting") {
  SECTION("implication forces ratio one") {
    auto c = three_by_three();
    Sequent s{{1}, {1}};  // a1 |- a1
    REQUIRE(sequent_holds(c, s));
    CHECK(conditional_probability(c, s.lhs, s.rhs) == Rat(1));
  }
  SECTION("empty consequent") {
    auto c = three_by_three();
    CHECK(conditional_probability(c, {0}, {}) == Rat(1));
  }
  SECTION("half of the conditioning class") {
    Classifier c4("c4", {"t0", "t1", "t2", "t3"}, {"a0", "a1"},
                  {{true, true}, {true, false}, {false, false}, {false, false}});
    CHECK(conditional_probability(c4, {0}, {1}) == Rat(1, 2));
  }
  SECTION("conditioning on measure zero is rejected") {
    auto c = three_by_three();
    CHECK_THROWS_AS(conditional_probability(c, {0, 1, 2}, {0}), domain_error);
  }
}

TEST_CASE("Bayes posterior") {
  SECTION("pure arithmetic") {
    // P(M|N) = P(N|M) P(M) / P(N) on explicitly supplied numbers happens
    // inside bayes_posterior; check the counting route against it.
    Classifier c4("c4", {"t0", "t1", "t2", "t3"}, {"m", "n"},
                  {{true, true}, {true, false}, {false, true}, {false, true}});
    // P(N|M) = 1/2, P(M) = 1/2, P(N) = 3/4 -> P(M|N) = 1/3.
    CHECK(bayes_posterior(c4, {0}, {1}) == Rat(1, 3));
    CHECK(bayes_posterior(c4, {0}, {1}) == conditional_probability(c4, {1}, {0}));
  }
  SECTION("certain evidence") {
    Classifier c2("c2", {"t0", "t1"}, {"m"}, {{true}, {true}});
    CHECK(bayes_posterior(c2, {0}, {0}) == Rat(1));
  }
  SECTION("counting route agrees with formula route on random tables") {
    std::mt19937_64 rng(11);
    int done = 0;
    while (done < 50) {
      auto c = random_classifier(rng, 6, 3);
      if (c.types.size() < 2) continue;
      std::vector<int> M{0}, N{1};
      long long nm = count_satisfying(c, M), nn = count_satisfying(c, N);
      if (nm == 0 || nn == 0) continue;
      CHECK(bayes_posterior(c, M, N) == conditional_probability(c, N, M));
      ++done;
    }
  }
}

TEST_CASE("belief propagation toward a core") {
  SECTION("single edge with identity conditional reproduces the prior") {
    BeliefDiagram d;
    d.nodes = {{"s", 2, {Rat(1, 3), Rat(2, 3)}}, {"core", 2, {}}};
    d.edges = {{0, 1, {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}}};
    d.core = 1;
    auto r = propagate_beliefs(d);
    CHECK(r.pre_normalization == std::vector<Rat>{Rat(1, 3), Rat(2, 3)});
    CHECK(r.normalized == r.pre_normalization);
  }
  SECTION("two-edge chain multiplies conditionals") {
    // Uniform scalar prior 1, two one-alternative hops of weight 1/2 each.
    BeliefDiagram d;
    d.nodes = {{"s", 1, {Rat(1)}}, {"mid", 1, {}}, {"core", 1, {}}};
    d.edges = {{0, 1, {{Rat(1, 2)}}}, {1, 2, {{Rat(1, 2)}}}};
    d.core = 2;
    auto r = propagate_beliefs(d);
    CHECK(r.pre_normalization == std::vector<Rat>{Rat(1, 4)});
    CHECK(r.normalized == std::vector<Rat>{Rat(1)});
  }
  SECTION("symmetric diamond yields equal core beliefs") {
    BeliefDiagram d;
    d.nodes = {{"s", 2, {Rat(1, 2), Rat(1, 2)}}, {"l", 2, {}}, {"r", 2, {}}, {"core", 2, {}}};
    std::vector<std::vector<Rat>> mix{{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}};
    d.edges = {{0, 1, mix}, {0, 2, mix}, {1, 3, mix}, {2, 3, mix}};
    d.core = 3;
    auto r = propagate_beliefs(d);
    CHECK(r.normalized[0] == r.normalized[1]);
    CHECK(r.normalized[0] == Rat(1, 2));
  }
  SECTION("directed cycle is rejected") {
    BeliefDiagram d;
    d.nodes = {{"a", 1, {Rat(1)}}, {"b", 1, {}}};
    d.edges = {{0, 1, {{Rat(1)}}}, {1, 0, {{Rat(1)}}}};
    d.core = 0;
    CHECK_THROWS_AS(propagate_beliefs(d), structure_error);
  }
}
