#include "doctest.h"

#include <set>

#include "csys/fragment.hpp"
#include "csys/instances.hpp"

using namespace csys;

namespace {

Budget small_budget(std::uint32_t max_len) {
  Budget b;
  b.max_len = max_len;
  return b;
}

}  // namespace

TEST_CASE("unit instance: objects, unique homs, fragment counts") {
  auto cs = std::make_shared<UnitCS>();
  CHECK(cs->pt().length == 0);
  CHECK(cs->ft(cs->pt()) == cs->pt());

  Fragment frag = enumerate_fragment(cs, small_budget(3));
  CHECK(frag.objects.size() == 4);
  std::size_t hom_count = 0;
  for (const auto& [key, hs] : frag.homs) {
    (void)key;
    CHECK(hs.mors.size() == 1);
    ++hom_count;
  }
  CHECK(hom_count == 16);
  CHECK_FALSE(frag.objects_truncated);
  CHECK_THROWS_AS(cs->point_count(cs->pt()), unsupported_error);
}

TEST_CASE("context instance: point and hom counting oracles") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2});
  ObHandle t = cs->object_of({0});
  ObHandle tt = cs->object_of({0, 0});

  // Brute force: points of a tuple object multiply base sizes.
  CHECK(cs->point_count(cs->pt()) == 1);
  CHECK(cs->point_count(t) == 2);
  CHECK(cs->point_count(tt) == 4);

  // |Mor(Y, X)| = |points(X)|^|points(Y)|, counted by enumeration.
  Budget b = small_budget(2);
  HomSet hs = cs->enum_hom(t, tt, b);
  CHECK_FALSE(hs.truncated);
  CHECK(hs.mors.size() == 16);

  // Tabulated morphisms are pairwise distinct handles.
  std::set<std::uint32_t> ids;
  for (MorHandle m : hs.mors) ids.insert(m.id);
  CHECK(ids.size() == 16);

  Fragment frag = enumerate_fragment(cs, small_budget(2));
  CHECK(frag.objects.size() == 3);
}

TEST_CASE("context instance: lexicographic point order") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2, 3});
  ObHandle x = cs->object_of({0, 1});
  CHECK(cs->point_count(x) == 6);
  auto encs = cs->point_encodings(x);
  REQUIRE(encs.size() == 6);
  CHECK(encs[0] == "((*,0),0)");
  CHECK(encs[5] == "((*,1),2)");

  // Two distinct length-1 objects: no level offset between them.
  ObHandle a = cs->object_of({0});
  ObHandle bo = cs->object_of({1});
  CHECK(a != bo);
  CHECK(cs->ft(a) == cs->ft(bo));
}

TEST_CASE("universe instance: telescope enumeration oracle") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{1, 2});
  Budget b = small_budget(2);
  bool trunc = false;
  auto objs = cs->enum_objects(2, b, &trunc);
  CHECK_FALSE(trunc);
  // Independent count: 1 (pt) + 2 (families over pt) + 2 + 4 (families over
  // the 1- and 2-point length-1 objects).
  CHECK(objs.size() == 9);

  ObHandle x0 = cs->extend(cs->pt(), {0});
  ObHandle x1 = cs->extend(cs->pt(), {1});
  CHECK(cs->point_count(x0) == 1);
  CHECK(cs->point_count(x1) == 2);
  CHECK(cs->ft(x1) == cs->pt());
}

TEST_CASE("universe instance: empty code gives pointless fibers") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{0, 1});
  ObHandle empty = cs->extend(cs->pt(), {0});
  CHECK(cs->point_count(empty) == 0);
  bool trunc = false;
  CHECK(cs->enum_sections(empty, Budget{}, &trunc).empty());
  // One function from the empty point set into any object.
  CHECK(cs->enum_hom(empty, cs->extend(cs->pt(), {1}), Budget{}).mors.size() == 1);
  // None into the empty object from an inhabited one.
  CHECK(cs->enum_hom(cs->pt(), empty, Budget{}).mors.empty());
}

TEST_CASE("strictness on the nose: (gf)*X and g*(f*X) intern identically") {
  auto cs = std::make_shared<UniverseCS>(std::vector<std::uint32_t>{1, 2});
  Budget b = small_budget(2);
  Fragment frag = enumerate_fragment(cs, b);
  std::uint64_t checked = 0;
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    ObHandle ftx = cs->ft(x);
    for (ObHandle y : frag.objects) {
      for (MorHandle f : frag.hom(y, ftx).mors) {
        for (ObHandle z : frag.objects) {
          for (MorHandle g : frag.hom(z, y).mors) {
            MorHandle gf = cs->compose(g, f);
            REQUIRE(cs->star(gf, x) == cs->star(g, cs->star(f, x)));
            REQUIRE(cs->q_map(gf, x) ==
                    cs->compose(cs->q_map(g, cs->star(f, x)), cs->q_map(f, x)));
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("fragment determinism: identical inputs give identical encodings") {
  Budget b = small_budget(2);
  auto cs1 = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2, 2});
  auto cs2 = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2, 2});
  Fragment f1 = enumerate_fragment(cs1, b);
  Fragment f2 = enumerate_fragment(cs2, b);
  REQUIRE(f1.objects.size() == f2.objects.size());
  for (std::size_t i = 0; i < f1.objects.size(); ++i)
    CHECK(cs1->ob_encoding(f1.objects[i]) == cs2->ob_encoding(f2.objects[i]));
  REQUIRE(f1.sections.size() == f2.sections.size());
  for (std::size_t i = 0; i < f1.sections.size(); ++i)
    CHECK(cs1->mor_encoding(f1.sections[i].mor) == cs2->mor_encoding(f2.sections[i].mor));
}

TEST_CASE("instance factory: config schema and rejection of bad configs") {
  CHECK(make_instance({{"kind", "unit"}})->kind() == "unit");
  CHECK(make_instance({{"kind", "context"}, {"base_sizes", {2, 2}}})->kind() == "context");
  CHECK(make_instance({{"kind", "universe"}, {"els", {1, 2}}})->kind() == "universe");
  CHECK_THROWS_AS(make_instance({{"kind", "context"}, {"base_sizes", nlohmann::json::array()}}),
                  domain_error);
  CHECK_THROWS_AS(make_instance({{"kind", "nope"}}), domain_error);
  CHECK_THROWS_AS(make_instance(nlohmann::json::array()), domain_error);
}

TEST_CASE("encoding round trip through ob_from_encoding") {
  auto cs = std::make_shared<ContextCS>(std::vector<std::uint32_t>{2, 3});
  ObHandle x = cs->object_of({1, 0});
  auto back = cs->ob_from_encoding(cs->ob_encoding(x));
  REQUIRE(back.has_value());
  CHECK(*back == x);
  CHECK_FALSE(cs->ob_from_encoding("[9]").has_value());
}
