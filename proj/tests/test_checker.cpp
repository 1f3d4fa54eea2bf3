#include <doctest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "csys/checker.hpp"
#include "csys/instances.hpp"

using namespace csys;

namespace {

Fixture fixture_named(const std::string& name) {
  for (const Fixture& f : fixtures())
    if (f.name == name) return f;
  REQUIRE(false);
  return {};
}

}  // namespace

TEST_CASE("fixtures: four shipped configs with expected windows") {
  std::vector<Fixture> fs = fixtures();
  REQUIRE(fs.size() == 4);
  CHECK(fs[0].name == "unit");
  CHECK(fs[0].budget.max_len == 4);
  CHECK(fs[1].name == "context2");
  CHECK(fs[1].budget.max_len == 3);
  CHECK(fs[2].name == "context22");
  CHECK(fs[2].budget.max_len == 2);
  CHECK(fs[3].name == "universe12");
  CHECK(fs[3].budget.max_len == 2);
  for (const Fixture& f : fs) CHECK(make_instance(f.instance_config) != nullptr);
}

TEST_CASE("suite_c0_c: passes on the unit fixture with full coverage") {
  Fixture f = fixture_named("unit");
  CSystemPtr cs = make_instance(f.instance_config);
  Fragment frag = enumerate_fragment(cs, f.budget);
  SuiteReport sr = suite_c0_c(cs, frag);
  CHECK(sr.suite == "axioms");
  CHECK(sr.checks.size() == 11);
  CHECK(sr.ok());
  CHECK(sr.failed() == 0);
  CHECK(sr.skipped() == 0);
  CHECK(sr.passed() == 11);
}

TEST_CASE("suite_prop_pullback: passes on the universe fixture") {
  Fixture f = fixture_named("universe12");
  CSystemPtr cs = make_instance(f.instance_config);
  Fragment frag = enumerate_fragment(cs, f.budget);
  SuiteReport sr = suite_prop_pullback(cs, frag);
  REQUIRE(sr.checks.size() == 2);
  CHECK(sr.checks[0].name == "pullback-universal");
  CHECK(sr.checks[1].name == "sf-from-pullback");
  for (const CheckReport& r : sr.checks) {
    CHECK(r.counterexamples.empty());
    CHECK(r.cases > 0);
  }
  CHECK(sr.ok());
}

TEST_CASE("suite_c0_c: a corrupted operation table fails with counterexamples") {
  Fixture f = fixture_named("context22");
  nlohmann::json cfg = {{"kind", "mutated"}, {"base", f.instance_config},
                        {"mutation", "permute_q"}};
  CSystemPtr cs = make_instance(cfg);
  Fragment frag = enumerate_fragment(cs, f.budget);
  SuiteReport sr = suite_c0_c(cs, frag);
  CHECK_FALSE(sr.ok());
  bool has_cex = false;
  for (const CheckReport& r : sr.checks) has_cex |= !r.counterexamples.empty();
  CHECK(has_cex);
}

TEST_CASE("suite_subsystem: seed battery passes on the unit fixture") {
  Fixture f = fixture_named("unit");
  CSystemPtr cs = make_instance(f.instance_config);
  Fragment frag = enumerate_fragment(cs, f.budget);
  std::vector<SubsystemSeed> seeds = default_subsystem_seeds(*cs, frag);
  REQUIRE(seeds.size() >= 5);
  for (const SubsystemSeed& seed : seeds) {
    SuiteReport sr = suite_subsystem(cs, seed, f.budget.max_len, frag);
    INFO(sr.suite);
    CHECK(sr.ok());
    // closed + 5 lemmas + idempotence + 2 determination reports.
    CHECK(sr.checks.size() == 9);
  }
}

TEST_CASE("suite_congruence: discrete relation passes on the universe fixture") {
  Fixture f = fixture_named("universe12");
  CSystemPtr cs = make_instance(f.instance_config);
  Fragment frag = enumerate_fragment(cs, f.budget);
  SuiteReport sr = suite_congruence(cs, RelationSeed{}, frag);
  CHECK(sr.ok());
  std::set<std::string> names;
  for (const CheckReport& r : sr.checks) names.insert(r.name);
  CHECK(names.count("congruence/closure") == 1);
  CHECK(names.count("congruence/prop-conditions") == 1);
  CHECK(names.count("congruence/def-conditions") == 1);
  CHECK(names.count("identity/projection-section") == 1);
  CHECK(names.count("quotient/well-defined") == 1);
  CHECK(names.count("quotient/c0/1-length-zero") == 1);
  CHECK(names.count("quotient/s/1-endpoints") == 1);
  CHECK(names.count("quotient/sections-are-classes") == 1);
  CHECK(names.count("congruence/roundtrip") == 1);
}

TEST_CASE("suite_congruence: a length-mismatched seed is rejected, not closed") {
  Fixture f = fixture_named("context22");
  CSystemPtr cs = make_instance(f.instance_config);
  Fragment frag = enumerate_fragment(cs, f.budget);
  RelationSeed seed;
  seed.ob_pairs.emplace_back(cs->pt(), *cs->ob_from_encoding("[0]"));
  SuiteReport sr = suite_congruence(cs, seed, frag);
  REQUIRE(sr.checks.size() == 1);
  CHECK(sr.checks[0].name == "congruence/closure");
  CHECK(sr.checks[0].status == CheckStatus::Fail);
  CHECK_FALSE(sr.ok());
}

TEST_CASE("default_relation_seeds: discrete always, collapse when it merges") {
  Fixture f22 = fixture_named("context22");
  CSystemPtr cs22 = make_instance(f22.instance_config);
  Fragment frag22 = enumerate_fragment(cs22, f22.budget);
  std::vector<RelationSeed> seeds = default_relation_seeds(*cs22, frag22);
  REQUIRE(seeds.size() == 2);
  CHECK(seeds[0].ob_pairs.empty());
  CHECK(seeds[0].sect_pairs.empty());
  CHECK_FALSE(seeds[1].ob_pairs.empty());
  CHECK_FALSE(seeds[1].sect_pairs.empty());

  Fixture fu = fixture_named("unit");
  CSystemPtr csu = make_instance(fu.instance_config);
  Fragment fragu = enumerate_fragment(csu, fu.budget);
  // One object per length: the collapse kernel is discrete, so only the
  // discrete seed remains.
  CHECK(default_relation_seeds(*csu, fragu).size() == 1);
}

TEST_CASE("suite_report_to_json: schema fields and totals") {
  SuiteReport sr{"demo", {}};
  CheckReport a{"ok-check"};
  a.cases = 3;
  a.finish();
  CheckReport b{"bad-check"};
  b.cases = 2;
  b.add_counterexample("in", "want", "got");
  b.finish();
  CheckReport c{"partial-check"};
  c.cases = 1;
  c.skipped_cases = 1;
  c.finish();
  sr.checks = {a, b, c};

  nlohmann::json j = suite_report_to_json(sr);
  CHECK(j.at("suite") == "demo");
  REQUIRE(j.at("checks").size() == 3);
  CHECK(j["checks"][0].at("status") == "pass");
  CHECK(j["checks"][1].at("status") == "fail");
  CHECK(j["checks"][1].at("counterexamples").size() == 1);
  CHECK(j["checks"][1]["counterexamples"][0].at("input") == "in");
  CHECK(j["checks"][2].at("status") == "skipped");
  CHECK(j["checks"][2].at("cases") == 1);
  CHECK(j["checks"][2].at("skipped_cases") == 1);
  CHECK(j["totals"].at("pass") == 1);
  CHECK(j["totals"].at("fail") == 1);
  CHECK(j["totals"].at("skipped") == 1);
  CHECK_FALSE(sr.ok());

  std::string text = suite_report_to_text(sr);
  CHECK(text.find("suite demo") != std::string::npos);
  CHECK(text.find("counterexample: input=in") != std::string::npos);
}

TEST_CASE("suites: reports serialize deterministically across runs") {
  Fixture f = fixture_named("universe12");
  auto once = [&]() {
    CSystemPtr cs = make_instance(f.instance_config);
    Fragment frag = enumerate_fragment(cs, f.budget);
    std::vector<SuiteReport> suites;
    suites.push_back(suite_c0_c(cs, frag));
    suites.push_back(suite_prop_pullback(cs, frag));
    return suites_to_json(suites).dump(2);
  };
  std::string first = once();
  std::string second = once();
  CHECK(first == second);
  CHECK(first.find("\"fail\": 0") != std::string::npos);
}

TEST_CASE("BudgetOverrides: only set fields replace fixture values") {
  Budget b;
  b.max_len = 4;
  b.pair_cap = 123;
  BudgetOverrides o;
  o.hom_cap = 99;
  Budget r = o.apply(b);
  CHECK(r.max_len == 4);
  CHECK(r.hom_cap == 99);
  CHECK(r.pair_cap == 123);
  CHECK(r.point_cap == b.point_cap);
}
