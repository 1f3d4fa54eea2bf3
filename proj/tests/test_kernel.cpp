#include "doctest.h"

#include "csys/instances.hpp"
#include "csys/kernel.hpp"

using namespace csys;

namespace {

Budget small_budget(std::uint32_t max_len) {
  Budget b;
  b.max_len = max_len;
  return b;
}

}  // namespace

TEST_CASE("ft_mor: identity and projection cases") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2});
  ObHandle x = cs->object_of({0});
  ObHandle xx = cs->object_of({0, 0});

  CHECK(ft_mor(*cs, cs->identity(xx)) == cs->proj(xx));
  // f = p(X') with ft(X') = X: the composite is p_{X',2}.
  CHECK(ft_mor(*cs, cs->proj(xx)) == proj_iter(*cs, xx, 2));
  CHECK_THROWS_AS(ft_mor(*cs, cs->identity(cs->pt())), domain_error);
  (void)x;
}

TEST_CASE("ft_mor in context fragment: tabulated composition oracle") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2});
  ObHandle x = cs->object_of({0, 0});
  Budget b = small_budget(2);
  for (MorHandle f : cs->enum_hom(cs->object_of({0}), x, b).mors) {
    MorHandle g = ft_mor(*cs, f);
    const auto& ftab = cs->mor_table(f);
    const auto& gtab = cs->mor_table(g);
    const auto& ptab = cs->mor_table(cs->proj(x));
    REQUIRE(gtab.size() == ftab.size());
    for (std::size_t i = 0; i < ftab.size(); ++i) CHECK(gtab[i] == ptab[ftab[i]]);
  }
}

TEST_CASE("proj_iter: base cases and the unique morphism to pt") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{1, 2});
  Budget b = small_budget(2);
  bool trunc = false;
  for (ObHandle x : cs->enum_objects(2, b, &trunc)) {
    CHECK(proj_iter(*cs, x, 0) == cs->identity(x));
    if (x.length >= 1) CHECK(proj_iter(*cs, x, 1) == cs->proj(x));
    // pt is final: enumeration gives exactly one morphism X -> pt.
    HomSet to_pt = cs->enum_hom(x, cs->pt(), b);
    REQUIRE(to_pt.mors.size() == 1);
    CHECK(proj_iter(*cs, x, x.length) == to_pt.mors.front());
    CHECK_THROWS_AS(proj_iter(*cs, x, x.length + 1), domain_error);
  }
}

TEST_CASE("star_iter and q_iter: base case, one step, identity") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2, 2});
  Budget b = small_budget(2);
  Fragment frag = enumerate_fragment(cs, b);
  for (ObHandle x : frag.objects) {
    for (std::uint32_t i = 0; i <= x.length; ++i) {
      ObHandle fti = ft_iter(*cs, x, i);
      MorHandle idf = cs->identity(fti);
      // Base change along an identity is trivial at every level.
      CHECK(star_iter(*cs, idf, x, i) == x);
      CHECK(q_iter(*cs, idf, x, i) == cs->identity(x));
      for (ObHandle y : frag.objects) {
        for (MorHandle f : frag.hom(y, fti).mors) {
          if (i == 0) {
            CHECK(star_iter(*cs, f, x, 0) == y);
            CHECK(q_iter(*cs, f, x, 0) == f);
          } else if (i == 1) {
            CHECK(star_iter(*cs, f, x, 1) == cs->star(f, x));
            CHECK(q_iter(*cs, f, x, 1) == cs->q_map(f, x));
          }
          if (i >= 1) {
            ObHandle s = star_iter(*cs, f, x, i);
            CHECK(s.length == y.length + i);
            CHECK(cs->ft(s) == star_iter(*cs, f, cs->ft(x), i - 1));
          }
        }
      }
    }
  }
}

TEST_CASE("sect_pull: identity pullback and the defining equations") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{1, 2});
  Budget b = small_budget(2);
  Fragment frag = enumerate_fragment(cs, b);
  std::uint64_t checked = 0;
  for (const Section& s : frag.sections) {
    ObHandle x = s.target();
    for (std::uint32_t i = 1; i <= x.length; ++i) {
      ObHandle base = ft_iter(*cs, x, i);
      // Identity pullback returns s itself.
      CHECK(sect_pull(*cs, cs->identity(base), s, i) == s);
      for (ObHandle y : frag.objects) {
        for (MorHandle f : frag.hom(y, base).mors) {
          Section r = sect_pull(*cs, f, s, i);
          // Independent endpoint characterization, used as the oracle.
          ObHandle tgt = star_iter(*cs, f, x, i);
          REQUIRE(r.mor.tgt == tgt);
          CHECK(cs->compose(r.mor, cs->proj(tgt)) == cs->identity(cs->ft(tgt)));
          CHECK(cs->compose(r.mor, q_iter(*cs, f, x, i)) ==
                cs->compose(q_iter(*cs, f, cs->ft(x), i - 1), s.mor));
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("level_offset: unit computations and a none case") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2, 3});
  ObHandle a = cs->object_of({0});
  ObHandle bo = cs->object_of({1});
  ObHandle ab = cs->object_of({0, 1});

  // ft(Y) = ft(X) gives i = 1.
  CHECK(level_offset(*cs, bo, a) == 1);
  // ft(Y) = pt, l(X) = n gives n.
  CHECK(level_offset(*cs, a, ab) == 2);
  // Distinct length-1 fathers: none.
  ObHandle bb = cs->object_of({1, 1});
  CHECK_FALSE(level_offset(*cs, bb, ab).has_value());
  // Weakening an object over itself is the i = 1 case.
  CHECK(level_offset(*cs, a, a) == 1);
  CHECK_FALSE(level_offset(*cs, ab, a).has_value());
}

TEST_CASE("eight operations: delta, partial, T base case") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2});
  ObHandle x = cs->object_of({0});
  Section d = op_delta(*cs, x);
  // partial(delta(X)) is p_X^*(X), whose ft is X.
  ObHandle px = op_partial(d);
  CHECK(px == cs->star(cs->proj(x), x));
  CHECK(cs->ft(px) == x);

  // T with i = 1 is base change along the projection.
  ObHandle y = cs->object_of({0});
  ObHandle xx = cs->object_of({0, 0});
  CHECK(op_T(*cs, cs->object_of({0, 0}), xx) == cs->star(cs->proj(xx), xx));
  (void)y;
}

TEST_CASE("op_St: pointwise substitution oracle in the universe instance") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{2, 2});
  // X of length 2 over Y of length 1; r a section into X, s a section into Y.
  ObHandle y = cs->extend(cs->pt(), {0});
  ObHandle x = cs->extend(y, {1, 1});
  Budget b = small_budget(2);
  bool trunc = false;
  for (Section s : cs->enum_sections(y, b, &trunc)) {
    for (Section r : cs->enum_sections(x, b, &trunc)) {
      Section out = op_St(*cs, s, r);
      // Substitution evaluates r over the image of s, pointwise.
      const auto& stab = cs->mor_table(s.mor);
      const auto& rtab = cs->mor_table(r.mor);
      ObHandle tgt = out.target();
      REQUIRE(cs->ft(tgt) == cs->pt());
      const auto& otab = cs->mor_table(out.mor);
      REQUIRE(otab.size() == 1);
      // The fiber element picked by r at the point s(0) survives substitution.
      auto elt_of = [](const std::string& enc) {
        auto p = enc.rfind(',');
        return enc.substr(p + 1, enc.size() - p - 2);
      };
      auto xenc = cs->point_encodings(x);
      auto tenc = cs->point_encodings(tgt);
      CHECK(elt_of(tenc[otab[0]]) == elt_of(xenc[rtab[stab[0]]]));
      // And the defining equations hold.
      CHECK(cs->compose(out.mor, cs->proj(tgt)) == cs->identity(cs->pt()));
    }
  }
}

TEST_CASE("solve_pullback: the cone of the square itself and sf agreement") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{1, 2});
  Budget b = small_budget(2);
  Fragment frag = enumerate_fragment(cs, b);
  std::uint64_t checked = 0;
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    ObHandle ftx = cs->ft(x);
    for (ObHandle y : frag.objects) {
      for (MorHandle f : frag.hom(y, ftx).mors) {
        ObHandle s = cs->star(f, x);
        MorHandle q = cs->q_map(f, x);
        // g1 = p(f*X), g2 = q(f,X) fills with the identity.
        CHECK(solve_pullback(*cs, cs->proj(s), q, f, x) == cs->identity(s));
        ++checked;
      }
    }
  }
  CHECK(checked > 20);

  // Z = Y, g1 = Id_Y reproduces s_g2 when the cone commutes.
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    for (ObHandle y : frag.objects) {
      for (MorHandle g2 : frag.hom(y, x).mors) {
        MorHandle f = ft_mor(*cs, g2);
        CHECK(solve_pullback(*cs, cs->identity(y), g2, f, x) == cs->section_of(g2).mor);
      }
    }
  }

  // The commutation precondition is enforced.
  auto ctx = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2});
  ObHandle t = ctx->object_of({0});
  ObHandle tt = ctx->object_of({0, 0});
  MorHandle f = ctx->identity(t);
  HomSet hom_t_tt = ctx->enum_hom(t, tt, b);
  bool threw = false;
  for (MorHandle g2 : hom_t_tt.mors) {
    if (ft_mor(*ctx, g2) == ctx->identity(t)) continue;
    CHECK_THROWS_AS(solve_pullback(*ctx, ctx->identity(t), g2, f, tt), domain_error);
    threw = true;
    break;
  }
  CHECK(threw);
}

TEST_CASE("sf fixpoint: sections satisfy ft(s) = Id and s_s = s") {
  for (CSystemPtr cs : {make_instance({{"kind", "context"}, {"base_sizes", {2, 2}}}),
                        make_instance({{"kind", "universe"}, {"els", {1, 2}}})}) {
    Budget b = small_budget(2);
    Fragment frag = enumerate_fragment(cs, b);
    for (const Section& s : frag.sections) {
      CHECK(ft_mor(*cs, s.mor) == cs->identity(s.mor.src));
      CHECK(cs->section_of(s.mor) == s);
      CHECK(cs->is_section(s.mor));
    }
    REQUIRE(!frag.sections.empty());
  }
}
