#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "qrflow/charclass.hpp"

using namespace qrflow;

TEST_CASE("chern characters") {
  SECTION("trivial bundles carry only their rank") {
    CHECK(chern_character(Rat(3), Rat(0), Rat(0)) == FormalClass{Rat(3), Rat(0), Rat(0)});
  }
  SECTION("a rank-two bundle with vanishing c1 reads 2 - c2") {
    for (int c2 : {-3, 0, 1, 7}) {
      auto ch = chern_character(Rat(2), Rat(0), Rat(c2));
      CHECK(ch.r0 == Rat(2));
      CHECK(ch.r2 == Rat(0));
      CHECK(ch.r4 == Rat(-c2));
    }
  }
  SECTION("products multiply degreewise") {
    auto plus = chern_character(Rat(2), Rat(0), Rat(3));
    auto minus = chern_character(Rat(2), Rat(0), Rat(-5));
    auto prod = fc_mul(plus, minus);
    CHECK(prod.r0 == Rat(4));
    CHECK(prod.r2 == Rat(0));
    // 4 - 2 c2(W+) - 2 c2(W-) at degree 4.
    CHECK(prod.r4 == Rat(-2) * Rat(3) + Rat(-2) * Rat(-5));
    CHECK(fc_mul(plus, minus) == fc_mul(minus, plus));
  }
  SECTION("formal algebra") {
    FormalClass a{Rat(1), Rat(2), Rat(3)};
    FormalClass b{Rat(4), Rat(5), Rat(6)};
    CHECK(fc_add(a, b) == FormalClass{Rat(5), Rat(7), Rat(9)});
    CHECK(fc_scale(Rat(1, 2), b) == FormalClass{Rat(2), Rat(5, 2), Rat(3)});
    CHECK(fc_mul(a, b).r4 == Rat(1) * Rat(6) + Rat(2) * Rat(5) + Rat(3) * Rat(4));
  }
}

TEST_CASE("power sums to chern classes") {
  SECTION("traceless roots") {
    auto [c1, c2] = chern_from_power_sums(Rat(0), Rat(10));
    CHECK(c1 == Rat(0));
    CHECK(c2 == Rat(-5));
  }
  SECTION("repeated-root degenerate case") {
    auto [c1, c2] = chern_from_power_sums(Rat(4), Rat(16));
    CHECK(c1 == Rat(4));
    CHECK(c2 == Rat(0));
  }
  SECTION("newton identity holds on random inputs") {
    std::mt19937 gen(99);
    std::uniform_int_distribution<int> dist(-20, 20);
    for (int t = 0; t < 50; ++t) {
      Rat t1(dist(gen), 1 + (t % 3));
      Rat t2(dist(gen), 1 + (t % 5));
      auto [c1, c2] = chern_from_power_sums(t1, t2);
      CHECK(c1 * c1 - 2 * c2 == t2);
    }
  }
  SECTION("vanishing c1 ties the pontryagin number to c2") {
    for (int c2 : {-4, -1, 0, 2, 9}) {
      Rat p1 = Rat(-2 * c2);  // p1 = c1^2 - 2 c2 with c1 = 0
      auto back = chern_from_power_sums(Rat(0), p1);
      CHECK(back.second == Rat(c2));
    }
  }
}

TEST_CASE("genus series") {
  CHECK(a_hat(Rat(0)) == FormalClass{Rat(1), Rat(0), Rat(0)});
  CHECK(a_hat(Rat(24)).r4 == Rat(-1));
  CHECK(a_hat(Rat(-48)).r4 == Rat(2));
  SECTION("twisting multiplies into the degree-4 coefficient") {
    auto integrand = fc_mul(chern_character(Rat(3), Rat(2), Rat(5)), a_hat(Rat(48)));
    CHECK(integrand.r4 == Rat(3) * Rat(-2) + Rat(2) * Rat(2) / 2 - Rat(5));
  }
}

TEST_CASE("betti data") {
  SECTION("the round sphere") {
    BettiVector s4;
    CHECK(signature(s4) == 0);
    CHECK(euler_characteristic(s4) == 2);
  }
  SECTION("balanced intersection forms have zero signature") {
    BettiVector b;
    b.b2 = 6;
    b.b_plus = 3;
    b.b_minus = 3;
    CHECK(signature(b) == 0);
    CHECK(euler_characteristic(b) == 8);
  }
  SECTION("a definite-light middle dimension") {
    BettiVector k3;
    k3.b2 = 22;
    k3.b_plus = 3;
    k3.b_minus = 19;
    CHECK(signature(k3) == -16);
    CHECK(euler_characteristic(k3) == 24);
  }
  SECTION("validation") {
    BettiVector bad;
    bad.b2 = 3;
    bad.b_plus = 1;
    bad.b_minus = 1;
    CHECK_THROWS_AS(signature(bad), input_error);
    BettiVector neg;
    neg.b1 = -1;
    CHECK_THROWS_AS(euler_characteristic(neg), input_error);
  }
}

TEST_CASE("line bundle index") {
  SECTION("flat data gives index zero") {
    auto r = index_line(Rat(0), Rat(0));
    CHECK(r.value == Rat(0));
    CHECK(r.integral);
  }
  SECTION("signature minus sixteen gives index two") {
    auto r = index_line(Rat(-16), Rat(0));
    CHECK(r.value == Rat(2));
    CHECK(r.integral);
  }
  SECTION("curvature and signature contributions cancel") {
    auto r = index_line(Rat(8), Rat(2));
    CHECK(r.value == Rat(0));
    CHECK(r.integral);
  }
  SECTION("non-geometric inputs show up as fractional values") {
    auto r = index_line(Rat(1), Rat(0));
    CHECK(r.value == Rat(-1, 8));
    CHECK_FALSE(r.integral);
  }
  SECTION("the pontryagin cross-check") {
    CHECK_NOTHROW(index_line(Rat(-16), Rat(0), true, Rat(-48)));
    CHECK_THROWS_AS(index_line(Rat(-16), Rat(0), true, Rat(-47)), input_error);
    CHECK_NOTHROW(index_line(Rat(0), Rat(3), true, Rat(0)));
  }
}

TEST_CASE("twisted dirac index") {
  SECTION("the trivial line over flat data") {
    auto r = index_bundle(Rat(1), Rat(0), Rat(0), Rat(0));
    CHECK(r.value == Rat(0));
    CHECK(r.integral);
  }
  SECTION("pure pontryagin contribution") {
    auto r = index_bundle(Rat(1), Rat(-48), Rat(0), Rat(0));
    CHECK(r.value == Rat(2));
    CHECK(r.integral);
  }
  SECTION("chern contributions enter with their signs") {
    CHECK(index_bundle(Rat(2), Rat(0), Rat(0), Rat(1)).value == Rat(-1));
    CHECK(index_bundle(Rat(2), Rat(0), Rat(6), Rat(0)).value == Rat(3));
  }
  SECTION("fractional outputs are flagged") {
    auto r = index_bundle(Rat(1), Rat(4), Rat(0), Rat(0));
    CHECK(r.value == Rat(-1, 6));
    CHECK_FALSE(r.integral);
  }
}

TEST_CASE("trace conjugation invariance") {
  SECTION("random conjugations never move the trace") {
    CHECK(trace_invariance_check(2, 25, 20240601) == 25);
    CHECK(trace_invariance_check(3, 10, 7) == 10);
    CHECK(trace_invariance_check(1, 5, 1) == 5);
  }
  SECTION("parameters are validated") {
    CHECK_THROWS_AS(trace_invariance_check(0, 5, 1), input_error);
    CHECK_THROWS_AS(trace_invariance_check(7, 5, 1), input_error);
    CHECK_THROWS_AS(trace_invariance_check(2, 0, 1), input_error);
  }
  SECTION("matrix primitives behave over the gaussian rationals") {
    CycMat m = cyc_mat_identity(2);
    m.at(0, 1) = Cyc::zeta(4, 1);  // [[1, i], [0, 1]]
    CycMat inv = cyc_mat_inverse(m);
    CHECK(cyc_mat_mul(m, inv).a == cyc_mat_identity(2).a);
    CHECK(cyc_mat_trace(m) == Cyc(Rat(2)));

    CycMat a = cyc_mat_identity(2), b = cyc_mat_identity(2);
    a.at(0, 1) = Cyc(Rat(3, 2));
    b.at(1, 0) = Cyc::zeta(4, 1) * Cyc(Rat(2));
    CHECK(cyc_mat_trace(cyc_mat_mul(a, b)) == cyc_mat_trace(cyc_mat_mul(b, a)));

    CycMat sing;
    sing.n = 2;
    sing.a.assign(4, Cyc(Rat(1)));
    CHECK_THROWS_AS(cyc_mat_inverse(sing), domain_error);
  }
}

TEST_CASE("tensor square coefficient") {
  CHECK(su2_c2_check({}));
  CHECK(su2_c2_check({Rat(0)}));
  CHECK(su2_c2_check({Rat(1), Rat(-2), Rat(5, 3)}));
}
