#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qrflow/bitstring.hpp"
#include "qrflow/cccd.hpp"
#include "qrflow/errors.hpp"
#include "qrflow/rational.hpp"

namespace qrflow {

// A screen of N mutually non-interacting bit slots.
struct HolographicScreen {
  int slot_count = 1;
  BitString config;

  HolographicScreen(int n, const BitString& c) : slot_count(n), config(c) {
    if (n < 1) throw input_error("screen needs at least one slot");
    if (c.width != n) throw input_error("configuration width mismatch");
  }
};

// Interaction weights for a separable screen Hamiltonian. The inverse
// temperature bound ln 2 is enforced against the rational lower bound
// 693/1000 < ln 2; strict mode tightens it to 7/10.
struct InteractionSpec {
  Rat beta;
  Rat temperature;
  Rat boltzmann = 1;
  std::vector<Rat> alphas;

  InteractionSpec(Rat b, Rat temp, std::vector<Rat> a, bool strict = false)
      : beta(std::move(b)), temperature(std::move(temp)), alphas(std::move(a)) {
    Rat bound = strict ? Rat(7, 10) : Rat(693, 1000);
    if (beta < bound)
      throw input_error("beta below the inverse-temperature bound " + rat_str(bound));
    if (temperature <= 0) throw input_error("temperature must be positive");
    if (alphas.empty()) throw input_error("at least one interaction weight required");
    Rat sum = 0;
    for (const auto& al : alphas) {
      if (al < 0 || al > 1) throw input_error("interaction weights must lie in [0,1]");
      sum += al;
    }
    if (sum != 1) throw input_error("interaction weights must sum to 1, got " + rat_str(sum));
  }
};

// Energy eigenvalue for one joint outcome (entries +1/-1 per slot).
inline Rat hab_eigenvalue(const InteractionSpec& spec, const std::vector<int>& outcome) {
  if (outcome.size() != spec.alphas.size())
    throw input_error("outcome length must match the weight list");
  Rat acc = 0;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i] != 1 && outcome[i] != -1) throw input_error("outcomes must be +1 or -1");
    acc += spec.alphas[i] * outcome[i];
  }
  return spec.beta * spec.boltzmann * spec.temperature * acc;
}

// Encoding square: evolving the string then encoding must agree with
// encoding then permuting the register basis. Canonical encoding is the
// standard basis index; an explicit table lets tests corrupt it.
inline bool encode_commutes_with(const BitString& x, const std::vector<std::uint32_t>& dynamics,
                                 const std::vector<std::uint32_t>& encoding) {
  if (dynamics.size() != token_count(x.width)) throw input_error("dynamics width mismatch");
  if (!is_permutation_table(dynamics)) throw input_error("dynamics must be a bijection");
  if (encoding.size() != dynamics.size()) throw input_error("encoding width mismatch");
  // Register side.
  std::uint32_t via_string = encoding[dynamics[x.index()]];
  std::uint32_t via_register = dynamics[encoding[x.index()]];
  if (via_string != via_register) return false;
  // Screen side: configurations evolve by the same table.
  BitString evolved(x.width, dynamics[x.index()]);
  return evolved.index() == dynamics[x.index()];
}

inline bool encode_commutes(const BitString& x, const std::vector<std::uint32_t>& dynamics) {
  std::vector<std::uint32_t> id(token_count(x.width));
  for (std::uint32_t i = 0; i < id.size(); ++i) id[i] = i;
  return encode_commutes_with(x, dynamics, id);
}

// ---- Cobordism words ----

struct Sector {
  std::string name;
  std::vector<int> slots;  // ascending
};

using Boundary = std::vector<Sector>;

inline std::string sector_name(const std::vector<int>& slots) {
  std::string out = "q";
  for (std::size_t i = 0; i < slots.size();) {
    std::size_t j = i;
    while (j + 1 < slots.size() && slots[j + 1] == slots[j] + 1) ++j;
    if (i > 0) out += ",";
    out += std::to_string(slots[i]);
    if (j > i) out += "-" + std::to_string(slots[j]);
    i = j + 1;
  }
  return out;
}

inline Sector make_sector(std::vector<int> slots) {
  if (slots.empty()) throw input_error("sector needs at least one slot");
  for (std::size_t i = 0; i + 1 < slots.size(); ++i)
    if (slots[i] >= slots[i + 1]) throw input_error("sector slots must be strictly ascending");
  Sector s;
  s.name = sector_name(slots);
  s.slots = std::move(slots);
  return s;
}

inline bool boundary_equal(const Boundary& a, const Boundary& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].slots != b[i].slots) return false;
  return true;
}

enum class GenKind { Cylinder, Pants, Copants, Rotate };

inline const char* gen_name(GenKind k) {
  switch (k) {
    case GenKind::Cylinder: return "cylinder";
    case GenKind::Pants: return "pants";
    case GenKind::Copants: return "copants";
    case GenKind::Rotate: return "rotate";
  }
  return "?";
}

// One elementary piece acting at position `at` of the boundary sector list.
// Copants splits off the first `split` slots of the sector; rotate applies a
// bijection to the sector's register.
struct Generator {
  GenKind kind = GenKind::Cylinder;
  int at = 0;
  int split = 0;
  std::vector<std::uint32_t> rho;
};

struct Cobordism {
  Boundary source;
  std::vector<Generator> word;
};

// Applies one generator to a boundary, enforcing the typing rules.
inline Boundary apply_generator(const Boundary& b, const Generator& g) {
  auto need_sector = [&](int at) {
    if (at < 0 || at >= static_cast<int>(b.size()))
      throw structure_error("generator sector position out of range");
  };
  Boundary out = b;
  switch (g.kind) {
    case GenKind::Cylinder:
      need_sector(g.at);
      return out;
    case GenKind::Pants: {
      need_sector(g.at);
      need_sector(g.at + 1);
      const auto& s1 = b[static_cast<std::size_t>(g.at)];
      const auto& s2 = b[static_cast<std::size_t>(g.at + 1)];
      std::set<int> merged(s1.slots.begin(), s1.slots.end());
      for (int s : s2.slots)
        if (!merged.insert(s).second) throw structure_error("pants legs share slot " + std::to_string(s));
      // Slot count is conserved: |merged| = |s1| + |s2|, register dims multiply.
      std::vector<int> slots(merged.begin(), merged.end());
      out.erase(out.begin() + g.at, out.begin() + g.at + 2);
      out.insert(out.begin() + g.at, make_sector(slots));
      return out;
    }
    case GenKind::Copants: {
      need_sector(g.at);
      const auto& s = b[static_cast<std::size_t>(g.at)];
      if (g.split < 1 || g.split >= static_cast<int>(s.slots.size()))
        throw structure_error("copants split must leave both legs nonempty");
      std::vector<int> first(s.slots.begin(), s.slots.begin() + g.split);
      std::vector<int> second(s.slots.begin() + g.split, s.slots.end());
      out.erase(out.begin() + g.at);
      out.insert(out.begin() + g.at, make_sector(second));
      out.insert(out.begin() + g.at, make_sector(first));
      return out;
    }
    case GenKind::Rotate: {
      need_sector(g.at);
      const auto& s = b[static_cast<std::size_t>(g.at)];
      if (g.rho.size() != token_count(static_cast<int>(s.slots.size())) ||
          !is_permutation_table(g.rho))
        throw structure_error("rotation table must be a bijection on the sector register");
      return out;
    }
  }
  throw structure_error("unknown generator");
}

// All intermediate boundaries, size |word| + 1. Throws on ill-typed words.
inline std::vector<Boundary> type_check(const Cobordism& c) {
  std::vector<Boundary> stages{c.source};
  for (const auto& g : c.word) stages.push_back(apply_generator(stages.back(), g));
  return stages;
}

inline Boundary cobordism_target(const Cobordism& c) { return type_check(c).back(); }

inline Cobordism identity_cobordism(const Boundary& b) { return {b, {}}; }

inline Cobordism compose_cobordism(const Cobordism& c1, const Cobordism& c2) {
  if (!boundary_equal(cobordism_target(c1), c2.source))
    throw structure_error("cobordism boundaries do not chain");
  Cobordism out;
  out.source = c1.source;
  out.word = c1.word;
  out.word.insert(out.word.end(), c2.word.begin(), c2.word.end());
  type_check(out);
  return out;
}

// ---- Canonical evaluation ----

// A linear map between qubit registers; the canonical theory only ever
// produces basis permutations.
struct TQFTMap {
  int width = 0;  // total slot count (register dim 2^width)
  std::vector<std::uint32_t> perm;
};

inline TQFTMap tqft_identity(int width) {
  TQFTMap m;
  m.width = width;
  m.perm = identity_perm(width);
  return m;
}

inline TQFTMap tqft_compose(const TQFTMap& first, const TQFTMap& then) {
  if (first.width != then.width) throw structure_error("register dimension mismatch");
  TQFTMap out;
  out.width = first.width;
  out.perm = compose_perms(first.perm, then.perm);
  return out;
}

namespace detail {

// Positions (in the global ascending slot order) occupied by a sector.
inline std::vector<int> sector_positions(const std::vector<int>& all_slots,
                                         const Sector& s) {
  std::vector<int> out;
  for (int slot : s.slots) {
    auto it = std::lower_bound(all_slots.begin(), all_slots.end(), slot);
    if (it == all_slots.end() || *it != slot)
      throw structure_error("sector slot missing from the register");
    out.push_back(static_cast<int>(it - all_slots.begin()));
  }
  return out;
}

}  // namespace detail

// Evaluates a word in the canonical theory: the register basis is indexed by
// global ascending slot order, so cylinder/pants/copants act as the identity
// and rotate permutes the sector's substring in place.
inline TQFTMap tqft_eval(const Cobordism& c) {
  auto stages = type_check(c);
  std::vector<int> all_slots;
  for (const auto& s : c.source)
    all_slots.insert(all_slots.end(), s.slots.begin(), s.slots.end());
  std::sort(all_slots.begin(), all_slots.end());
  int width = static_cast<int>(all_slots.size());
  if (width < 1 || width > 20) throw structure_error("register width out of range");

  TQFTMap acc = tqft_identity(width);
  for (std::size_t step = 0; step < c.word.size(); ++step) {
    const auto& g = c.word[step];
    if (g.kind != GenKind::Rotate) continue;  // identity under the global basis order
    const auto& sector = stages[step][static_cast<std::size_t>(g.at)];
    auto pos = detail::sector_positions(all_slots, sector);
    int ns = static_cast<int>(pos.size());
    TQFTMap stepmap = tqft_identity(width);
    for (std::uint32_t x = 0; x < token_count(width); ++x) {
      BitString bs(width, x);
      std::uint32_t sub = 0;
      for (int k = 0; k < ns; ++k) sub = (sub << 1) | static_cast<std::uint32_t>(bs.get(pos[static_cast<std::size_t>(k)]));
      std::uint32_t rotated = g.rho[sub];
      BitString out = bs;
      for (int k = 0; k < ns; ++k)
        out = out.with(pos[static_cast<std::size_t>(k)], static_cast<int>((rotated >> (ns - 1 - k)) & 1u));
      stepmap.perm[x] = out.index();
    }
    acc = tqft_compose(acc, stepmap);
  }
  return acc;
}

// ---- The functor from diagram morphisms ----

namespace detail {

// Boundary of a builder diagram: one sector per sub-core, ordered by group.
inline Boundary diagram_boundary(const CCCDiagram& d) {
  std::map<int, std::vector<int>> by_group;
  for (const auto& n : d.nodes)
    if (n.role == Role::Base) by_group[n.group].push_back(n.position);
  if (by_group.empty()) throw structure_error("diagram has no base classifiers");
  Boundary b;
  for (auto& [g, slots] : by_group) {
    std::sort(slots.begin(), slots.end());
    b.push_back(make_sector(slots));
  }
  return b;
}

}  // namespace detail

// Fission becomes the splitting piece, fusion the merging piece, rotation a
// sector rewrite, identity a cylinder; composites concatenate.
inline Cobordism functor_F(const DiagramMorphism& m) {
  switch (m.kind) {
    case MorKind::Identity: {
      Cobordism c;
      c.source = detail::diagram_boundary(m.source);
      Generator g;
      g.kind = GenKind::Cylinder;
      g.at = 0;
      c.word = {g};
      return c;
    }
    case MorKind::Fission: {
      Cobordism c;
      c.source = detail::diagram_boundary(m.source);
      if (c.source.size() != 1) throw structure_error("fission expects a single-sector source");
      int split_slots = 0;
      for (int s : c.source[0].slots)
        if (s < m.split) ++split_slots;
      Generator g;
      g.kind = GenKind::Copants;
      g.at = 0;
      g.split = split_slots;
      c.word = {g};
      type_check(c);
      return c;
    }
    case MorKind::Fusion: {
      Cobordism c;
      c.source = detail::diagram_boundary(m.source);
      if (c.source.size() != 2) throw structure_error("fusion expects a two-sector source");
      Generator g;
      g.kind = GenKind::Pants;
      g.at = 0;
      c.word = {g};
      type_check(c);
      return c;
    }
    case MorKind::Rotation: {
      Cobordism c;
      c.source = detail::diagram_boundary(m.source);
      Generator g;
      g.kind = GenKind::Rotate;
      if (c.source.size() == 1) {
        // Whole register in one sector: embed the suffix bijection.
        g.at = 0;
        g.rho = lift_suffix_perm(m.source.width, m.rot_prefix, m.rot);
      } else {
        // The rotated block must be exactly one sector.
        std::vector<int> suffix;
        for (int s = m.rot_prefix; s < m.source.width; ++s) suffix.push_back(s);
        int at = -1;
        for (std::size_t i = 0; i < c.source.size(); ++i)
          if (c.source[i].slots == suffix) at = static_cast<int>(i);
        if (at < 0) throw structure_error("rotated block is not a boundary sector");
        g.at = at;
        g.rho = m.rot;
      }
      c.word = {g};
      type_check(c);
      return c;
    }
    case MorKind::Composite: {
      if (m.parts.empty()) throw structure_error("composite morphism carries no parts");
      Cobordism acc = functor_F(m.parts[0]);
      for (std::size_t i = 1; i < m.parts.size(); ++i)
        acc = compose_cobordism(acc, functor_F(m.parts[i]));
      return acc;
    }
  }
  throw structure_error("morphism kind is not tagged");
}

// ---- Square check ----

struct SquareReport {
  bool ok = true;
  std::optional<std::uint32_t> witness;  // first basis state where routes differ
};

// Compares a cobordism's evaluation against the state relabeling the
// morphism performs, over every basis state.
inline SquareReport commuting_square_report(const DiagramMorphism& m, const Cobordism& image) {
  cccd_to_qrf(m.source);
  cccd_to_qrf(m.target);
  auto relabel = state_map(m);
  auto eval = tqft_eval(image);
  if (eval.perm.size() != relabel.size())
    throw input_error("register dimension mismatch between routes");
  SquareReport rep;
  for (std::uint32_t x = 0; x < relabel.size(); ++x) {
    if (eval.perm[x] != relabel[x]) {
      rep.ok = false;
      rep.witness = x;
      return rep;
    }
  }
  return rep;
}

inline SquareReport commuting_square_report(const DiagramMorphism& m) {
  return commuting_square_report(m, functor_F(m));
}

inline bool commuting_square_check(const DiagramMorphism& m) {
  return commuting_square_report(m).ok;
}

}  // namespace qrflow
