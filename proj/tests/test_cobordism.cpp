#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "qrflow/cobordism.hpp"

using namespace qrflow;

namespace {

std::vector<Rat> uniform_weights(int n) {
  return std::vector<Rat>(static_cast<std::size_t>(n), Rat(1, n));
}

// Dynamics table implementing "output bit i = input bit (i+1) mod w".
std::vector<std::uint32_t> cyclic_bit_shift(int w) {
  std::vector<std::uint32_t> table(token_count(w));
  for (std::uint32_t x = 0; x < table.size(); ++x) {
    BitString in(w, x);
    BitString out(w, 0);
    for (int i = 0; i < w; ++i) out = out.with(i, in.get((i + 1) % w));
    table[x] = out.index();
  }
  return table;
}

bool same_generator(const Generator& a, const Generator& b) {
  return a.kind == b.kind && a.at == b.at && a.split == b.split && a.rho == b.rho;
}

bool same_word(const std::vector<Generator>& a, const std::vector<Generator>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_generator(a[i], b[i])) return false;
  return true;
}

Generator gen_pants(int at) {
  Generator g;
  g.kind = GenKind::Pants;
  g.at = at;
  return g;
}

Generator gen_copants(int at, int split) {
  Generator g;
  g.kind = GenKind::Copants;
  g.at = at;
  g.split = split;
  return g;
}

Generator gen_rotate(int at, std::vector<std::uint32_t> rho) {
  Generator g;
  g.kind = GenKind::Rotate;
  g.at = at;
  g.rho = std::move(rho);
  return g;
}

const std::vector<std::uint32_t> kSwap2 = {0, 2, 1, 3};  // (a,b) -> (b,a)

}  // namespace

TEST_CASE("screen configurations") {
  HolographicScreen s(3, BitString::parse("101"));
  CHECK(s.slot_count == 3);
  CHECK(s.config.index() == 5u);
  CHECK_THROWS_AS(HolographicScreen(0, BitString(0, 0)), input_error);
  CHECK_THROWS_AS(HolographicScreen(3, BitString::parse("10")), input_error);
}

TEST_CASE("interaction energies") {
  SECTION("all outcomes aligned gives beta times temperature") {
    InteractionSpec spec(Rat(7, 10), Rat(2), uniform_weights(4));
    CHECK(hab_eigenvalue(spec, {1, 1, 1, 1}) == Rat(7, 5));
  }
  SECTION("uniform weights depend only on the alignment count") {
    InteractionSpec spec(Rat(7, 10), Rat(1), uniform_weights(4));
    for (int mask = 0; mask < 16; ++mask) {
      std::vector<int> outcome;
      int plus = 0;
      for (int i = 0; i < 4; ++i) {
        int s = (mask >> i) & 1 ? 1 : -1;
        plus += s == 1;
        outcome.push_back(s);
      }
      CHECK(hab_eigenvalue(spec, outcome) == Rat(7, 10) * Rat(2 * plus - 4, 4));
    }
    // Balanced outcomes cancel exactly.
    CHECK(hab_eigenvalue(spec, {1, 1, -1, -1}) == Rat(0));
    CHECK(hab_eigenvalue(spec, {1, -1, 1, -1}) == Rat(0));
  }
  SECTION("non-uniform weights break outcome-order symmetry") {
    InteractionSpec spec(Rat(3, 4), Rat(4), {Rat(1, 2), Rat(1, 3), Rat(1, 6)});
    CHECK(hab_eigenvalue(spec, {1, -1, 1}) == Rat(1));
    CHECK(hab_eigenvalue(spec, {1, 1, -1}) == Rat(2));
  }
  SECTION("inverse-temperature bound") {
    CHECK_NOTHROW(InteractionSpec(Rat(693, 1000), Rat(1), {Rat(1)}));
    CHECK_THROWS_AS(InteractionSpec(Rat(692, 1000), Rat(1), {Rat(1)}), input_error);
    // Strict mode tightens the bound to 7/10.
    CHECK_THROWS_AS(InteractionSpec(Rat(693, 1000), Rat(1), {Rat(1)}, true), input_error);
    CHECK_NOTHROW(InteractionSpec(Rat(7, 10), Rat(1), {Rat(1)}, true));
  }
  SECTION("spec validation") {
    CHECK_THROWS_AS(InteractionSpec(Rat(1), Rat(0), {Rat(1)}), input_error);
    CHECK_THROWS_AS(InteractionSpec(Rat(1), Rat(1), {}), input_error);
    CHECK_THROWS_AS(InteractionSpec(Rat(1), Rat(1), {Rat(1, 2), Rat(1, 3)}), input_error);
    CHECK_THROWS_AS(InteractionSpec(Rat(1), Rat(1), {Rat(3, 2), Rat(-1, 2)}), input_error);
  }
  SECTION("outcome validation") {
    InteractionSpec spec(Rat(1), Rat(1), uniform_weights(2));
    CHECK_THROWS_AS(hab_eigenvalue(spec, {1, 0}), input_error);
    CHECK_THROWS_AS(hab_eigenvalue(spec, {1}), input_error);
  }
}

TEST_CASE("encoding squares") {
  SECTION("identity dynamics commutes for every string") {
    for (std::uint32_t x = 0; x < token_count(3); ++x)
      CHECK(encode_commutes(BitString(3, x), identity_perm(3)));
  }
  SECTION("bit permutations commute exhaustively") {
    for (int w = 1; w <= 10; ++w) {
      auto dyn = cyclic_bit_shift(w);
      bool all = true;
      for (std::uint32_t x = 0; x < token_count(w); ++x)
        all = all && encode_commutes(BitString(w, x), dyn);
      CHECK(all);
    }
  }
  SECTION("a corrupted encoding table fails on a witness string") {
    std::vector<std::uint32_t> dyn = {1, 2, 3, 0};
    std::vector<std::uint32_t> enc = {1, 0, 2, 3};  // identity with 0 and 1 swapped
    CHECK_FALSE(encode_commutes_with(BitString(2, 0), dyn, enc));
    CHECK(encode_commutes_with(BitString(2, 2), dyn, enc));
  }
  SECTION("dynamics validation") {
    CHECK_THROWS_AS(encode_commutes(BitString(2, 0), {0, 0, 1, 3}), input_error);
    CHECK_THROWS_AS(encode_commutes(BitString(3, 0), {1, 0, 3, 2}), input_error);
  }
}

TEST_CASE("sector naming") {
  CHECK(make_sector({0, 1, 2, 3}).name == "q0-3");
  CHECK(make_sector({0, 2, 3, 5}).name == "q0,2-3,5");
  CHECK(make_sector({7}).name == "q7");
  CHECK_THROWS_AS(make_sector({}), input_error);
  CHECK_THROWS_AS(make_sector({0, 0}), input_error);
  CHECK_THROWS_AS(make_sector({2, 1}), input_error);
}

TEST_CASE("word typing") {
  Boundary whole{make_sector({0, 1, 2, 3})};
  SECTION("identity composes as a two-sided unit") {
    Cobordism c{whole, {gen_copants(0, 2), gen_pants(0)}};
    auto left = compose_cobordism(identity_cobordism(c.source), c);
    auto right = compose_cobordism(c, identity_cobordism(cobordism_target(c)));
    CHECK(same_word(left.word, c.word));
    CHECK(same_word(right.word, c.word));
    CHECK(boundary_equal(left.source, c.source));
    CHECK(boundary_equal(cobordism_target(right), cobordism_target(c)));
  }
  SECTION("split then merge returns to the starting boundary") {
    Cobordism c{whole, {gen_copants(0, 2), gen_pants(0)}};
    auto stages = type_check(c);
    REQUIRE(stages.size() == 3);
    CHECK(boundary_equal(stages[0], whole));
    REQUIRE(stages[1].size() == 2);
    CHECK(stages[1][0].slots == std::vector<int>{0, 1});
    CHECK(stages[1][1].slots == std::vector<int>{2, 3});
    CHECK(boundary_equal(stages[2], whole));
    CHECK(boundary_equal(cobordism_target(c), c.source));
  }
  SECTION("a chained decomposition tracks compatible slot partitions") {
    Cobordism c{whole,
                {gen_copants(0, 2), gen_copants(0, 1), gen_pants(1), gen_pants(0)}};
    auto stages = type_check(c);
    REQUIRE(stages.size() == 5);
    REQUIRE(stages[2].size() == 3);
    CHECK(stages[2][0].slots == std::vector<int>{0});
    CHECK(stages[2][1].slots == std::vector<int>{1});
    CHECK(stages[2][2].slots == std::vector<int>{2, 3});
    REQUIRE(stages[3].size() == 2);
    CHECK(stages[3][1].slots == std::vector<int>{1, 2, 3});
    CHECK(boundary_equal(stages[4], whole));
    // Slot count is conserved at every stage.
    for (const auto& b : stages) {
      std::set<int> seen;
      int total = 0;
      for (const auto& s : b) {
        total += static_cast<int>(s.slots.size());
        seen.insert(s.slots.begin(), s.slots.end());
      }
      CHECK(total == 4);
      CHECK(seen.size() == 4);
    }
  }
  SECTION("pants legs may not share a slot") {
    Boundary overlapping{make_sector({0, 1}), make_sector({1, 2})};
    Cobordism c{overlapping, {gen_pants(0)}};
    CHECK_THROWS_AS(type_check(c), structure_error);
  }
  SECTION("generator positions and splits are bounds-checked") {
    CHECK_THROWS_AS(type_check({whole, {gen_pants(0)}}), structure_error);
    CHECK_THROWS_AS(type_check({whole, {gen_copants(0, 0)}}), structure_error);
    CHECK_THROWS_AS(type_check({whole, {gen_copants(0, 4)}}), structure_error);
    CHECK_THROWS_AS(type_check({whole, {gen_copants(1, 2)}}), structure_error);
  }
  SECTION("rotation tables are validated against the sector register") {
    CHECK_THROWS_AS(type_check({whole, {gen_rotate(0, {1, 0})}}), structure_error);
    std::vector<std::uint32_t> repeat(16, 0);
    CHECK_THROWS_AS(type_check({whole, {gen_rotate(0, repeat)}}), structure_error);
  }
  SECTION("composition requires chained boundaries") {
    Cobordism split{whole, {gen_copants(0, 2)}};
    Cobordism also_split{whole, {gen_copants(0, 2)}};
    CHECK_THROWS_AS(compose_cobordism(split, also_split), structure_error);
  }
}

TEST_CASE("word evaluation") {
  SECTION("the empty word evaluates to the identity") {
    auto m = tqft_eval(identity_cobordism({make_sector({0, 1, 2})}));
    CHECK(m.width == 3);
    CHECK(m.perm == identity_perm(3));
  }
  SECTION("split and merge evaluate to the identity") {
    Boundary whole{make_sector({0, 1, 2, 3})};
    Cobordism c{whole, {gen_copants(0, 2), gen_pants(0)}};
    CHECK(tqft_eval(c).perm == identity_perm(4));
  }
  SECTION("a rotation followed by its inverse cancels") {
    Boundary whole{make_sector({0, 1})};
    std::vector<std::uint32_t> rho = {1, 2, 3, 0};
    std::vector<std::uint32_t> inv = {3, 0, 1, 2};
    Cobordism c{whole, {gen_rotate(0, rho), gen_rotate(0, inv)}};
    CHECK(tqft_eval(c).perm == identity_perm(2));
  }
  SECTION("composed rotations multiply like permutations") {
    Boundary whole{make_sector({0, 1})};
    std::vector<std::uint32_t> r1 = {1, 2, 3, 0};
    std::vector<std::uint32_t> r2 = {0, 2, 1, 3};
    Cobordism c{whole, {gen_rotate(0, r1), gen_rotate(0, r2)}};
    CHECK(tqft_eval(c).perm == oracles::perm_product(r1, r2));
    Cobordism rev{whole, {gen_rotate(0, r2), gen_rotate(0, r1)}};
    CHECK(tqft_eval(rev).perm == oracles::perm_product(r2, r1));
  }
  SECTION("a sector rotation acts on its slots inside the full register") {
    Boundary b{make_sector({0}), make_sector({1, 2})};
    Cobordism c{b, {gen_rotate(1, kSwap2)}};
    auto m = tqft_eval(c);
    CHECK(m.width == 3);
    // Bits 1 and 2 swap while bit 0 rides along.
    CHECK(m.perm == std::vector<std::uint32_t>{0, 2, 1, 3, 4, 6, 5, 7});
  }
  SECTION("evaluation is stable under interleaved structural moves") {
    Boundary whole{make_sector({0, 1, 2})};
    Cobordism c{whole,
                {gen_copants(0, 1), gen_pants(0),
                 gen_rotate(0, lift_suffix_perm(3, 1, kSwap2)), gen_copants(0, 2)}};
    CHECK(tqft_eval(c).perm == std::vector<std::uint32_t>{0, 2, 1, 3, 4, 6, 5, 7});
  }
}

TEST_CASE("morphism images") {
  SECTION("identity maps to a cylinder") {
    auto d = build_elementary(3, BitString::parse("101"));
    auto c = functor_F(identity_morphism(d));
    REQUIRE(c.word.size() == 1);
    CHECK(c.word[0].kind == GenKind::Cylinder);
    REQUIRE(c.source.size() == 1);
    CHECK(c.source[0].slots == std::vector<int>{0, 1, 2});
    CHECK(tqft_eval(c).perm == identity_perm(3));
  }
  SECTION("fission maps to the splitting piece") {
    auto m = fission(build_elementary(4, BitString::parse("1010")), 2);
    auto c = functor_F(m);
    REQUIRE(c.word.size() == 1);
    CHECK(c.word[0].kind == GenKind::Copants);
    CHECK(c.word[0].split == 2);
    auto tgt = cobordism_target(c);
    REQUIRE(tgt.size() == 2);
    CHECK(tgt[0].slots == std::vector<int>{0, 1});
    CHECK(tgt[1].slots == std::vector<int>{2, 3});
  }
  SECTION("fusion maps to the merging piece") {
    auto parts = extract_components(fission(build_elementary(4, BitString::parse("1010")), 2).target);
    auto m = fuse(parts[0], parts[1]);
    auto c = functor_F(m);
    REQUIRE(c.word.size() == 1);
    CHECK(c.word[0].kind == GenKind::Pants);
    REQUIRE(c.source.size() == 2);
    auto tgt = cobordism_target(c);
    REQUIRE(tgt.size() == 1);
    CHECK(tgt[0].slots == std::vector<int>{0, 1, 2, 3});
  }
  SECTION("split then merge images chain into a closed loop") {
    auto d = build_elementary(4, BitString::parse("1010"));
    auto fis = fission(d, 2);
    auto parts = extract_components(fis.target);
    auto fus = fuse(parts[0], parts[1]);
    auto loop = compose_cobordism(functor_F(fis), functor_F(fus));
    REQUIRE(loop.word.size() == 2);
    CHECK(loop.word[0].kind == GenKind::Copants);
    CHECK(loop.word[1].kind == GenKind::Pants);
    CHECK(boundary_equal(cobordism_target(loop), loop.source));
    CHECK(tqft_eval(loop).perm == identity_perm(4));
  }
  SECTION("whole-register rotation embeds its suffix bijection") {
    auto d = build_elementary(3, BitString::parse("101"));
    auto m = basis_rotation(d, 1, kSwap2);
    auto c = functor_F(m);
    REQUIRE(c.word.size() == 1);
    CHECK(c.word[0].kind == GenKind::Rotate);
    CHECK(c.word[0].at == 0);
    CHECK(c.word[0].rho == lift_suffix_perm(3, 1, kSwap2));
    CHECK(tqft_eval(c).perm == state_map(m));
  }
  SECTION("a rotation confined to one sub-core rotates that sector") {
    auto split = fission(build_elementary(4, BitString::parse("1010")), 2).target;
    auto m = basis_rotation(split, 2, kSwap2);
    auto c = functor_F(m);
    REQUIRE(c.word.size() == 1);
    CHECK(c.word[0].kind == GenKind::Rotate);
    CHECK(c.word[0].at == 1);
    CHECK(c.word[0].rho == kSwap2);
    CHECK(tqft_eval(c).perm == state_map(m));
  }
  SECTION("composite images concatenate part images") {
    auto d = build_elementary(4, BitString::parse("1010"));
    auto fis = fission(d, 2);
    auto rot = basis_rotation(fis.target, 2, kSwap2);
    auto comp = compose_morphisms(fis, rot);
    auto c = functor_F(comp);
    REQUIRE(c.word.size() == 2);
    CHECK(c.word[0].kind == GenKind::Copants);
    CHECK(c.word[1].kind == GenKind::Rotate);
    auto glued = compose_cobordism(functor_F(fis), functor_F(rot));
    CHECK(boundary_equal(c.source, glued.source));
    CHECK(same_word(c.word, glued.word));
    CHECK(tqft_eval(c).perm == state_map(comp));
    CHECK(tqft_eval(c).perm ==
          oracles::perm_product(state_map(fis), state_map(rot)));
  }
  SECTION("merge, rotate, split type-checks and evaluates to the rotation") {
    Boundary halves{make_sector({0, 1}), make_sector({2, 3})};
    auto rho = lift_suffix_perm(4, 2, kSwap2);
    Cobordism c{halves, {gen_pants(0), gen_rotate(0, rho), gen_copants(0, 2)}};
    CHECK(boundary_equal(cobordism_target(c), halves));
    CHECK(tqft_eval(c).perm == rho);
  }
}

TEST_CASE("commuting squares") {
  SECTION("identity and structural morphisms commute") {
    auto d = build_elementary(3, BitString::parse("101"));
    CHECK(commuting_square_check(identity_morphism(d)));
    for (int w = 2; w <= 4; ++w) {
      BitString e(w, 0);
      for (int i = 0; i < w; i += 2) e = e.with(i, 1);
      for (int split = 1; split < w; ++split) {
        auto m = fission(build_elementary(w, e), split);
        CHECK(commuting_square_check(m));
        auto parts = extract_components(m.target);
        CHECK(commuting_square_check(fuse(parts[0], parts[1])));
      }
    }
  }
  SECTION("rotations commute against their own images") {
    auto d = build_elementary(2, BitString::parse("11"));
    auto m = basis_rotation(d, 1, {1, 0});
    auto rep = commuting_square_report(m);
    CHECK(rep.ok);
    CHECK_FALSE(rep.witness.has_value());
  }
  SECTION("a corrupted image fails with a witness state") {
    auto d = build_elementary(2, BitString::parse("11"));
    auto m = basis_rotation(d, 1, {1, 0});
    Boundary b{make_sector({0, 1})};
    // Image that forgets to rotate: first mismatch is the all-zero state.
    auto rep0 = commuting_square_report(m, identity_cobordism(b));
    CHECK_FALSE(rep0.ok);
    REQUIRE(rep0.witness.has_value());
    CHECK(*rep0.witness == 0u);
    // Image rotating by the wrong bijection.
    Cobordism wrong{b, {gen_rotate(0, {0, 1, 3, 2})}};
    auto rep1 = commuting_square_report(m, wrong);
    CHECK_FALSE(rep1.ok);
    REQUIRE(rep1.witness.has_value());
    CHECK(*rep1.witness == 0u);
  }
  SECTION("route registers must agree in dimension") {
    auto d = build_elementary(2, BitString::parse("11"));
    auto m = basis_rotation(d, 1, {1, 0});
    Boundary wide{make_sector({0, 1, 2})};
    CHECK_THROWS_AS(commuting_square_report(m, identity_cobordism(wide)), input_error);
  }
}
