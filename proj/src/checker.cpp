#include "csys/checker.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "csys/instances.hpp"
#include "csys/kernel.hpp"

namespace csys {

namespace {

std::size_t count_status(const SuiteReport& sr, CheckStatus s) {
  std::size_t n = 0;
  for (const CheckReport& r : sr.checks)
    if (r.status == s) ++n;
  return n;
}

std::vector<ObHandle> carrier_obs(const Fragment& frag) {
  std::vector<ObHandle> obs = frag.objects;
  obs.insert(obs.end(), frag.aux.begin(), frag.aux.end());
  return obs;
}

}  // namespace

std::size_t SuiteReport::passed() const { return count_status(*this, CheckStatus::Pass); }
std::size_t SuiteReport::failed() const { return count_status(*this, CheckStatus::Fail); }
std::size_t SuiteReport::skipped() const { return count_status(*this, CheckStatus::Skipped); }

nlohmann::json suite_report_to_json(const SuiteReport& sr) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckReport& r : sr.checks) {
    nlohmann::json cexs = nlohmann::json::array();
    for (const Counterexample& c : r.counterexamples)
      cexs.push_back({{"input", c.input}, {"expected", c.expected}, {"actual", c.actual}});
    checks.push_back({{"name", r.name},
                      {"status", to_string(r.status)},
                      {"counterexamples", std::move(cexs)},
                      {"cases", r.cases},
                      {"skipped_cases", r.skipped_cases}});
  }
  return {{"suite", sr.suite},
          {"checks", std::move(checks)},
          {"totals",
           {{"pass", sr.passed()}, {"fail", sr.failed()}, {"skipped", sr.skipped()}}}};
}

std::string suite_report_to_text(const SuiteReport& sr) {
  std::ostringstream os;
  os << "suite " << sr.suite << ": " << sr.passed() << " pass, " << sr.failed() << " fail, "
     << sr.skipped() << " skipped\n";
  for (const CheckReport& r : sr.checks) {
    os << "  [" << to_string(r.status) << "] " << r.name << " (cases=" << r.cases
       << ", skipped=" << r.skipped_cases << ")\n";
    for (const Counterexample& c : r.counterexamples)
      os << "    counterexample: input=" << c.input << " expected=" << c.expected
         << " actual=" << c.actual << "\n";
  }
  return os.str();
}

SuiteReport suite_c0_c(CSystemPtr cs, const Fragment& frag) {
  SuiteReport sr{"axioms", {}};
  for (CheckReport& r : check_c0_axioms(*cs, frag)) sr.checks.push_back(std::move(r));
  for (CheckReport& r : check_s_axioms(*cs, frag)) sr.checks.push_back(std::move(r));
  return sr;
}

SuiteReport suite_prop_pullback(CSystemPtr cs, const Fragment& frag) {
  SuiteReport sr{"pullback", {}};
  // Per (X, Y) the candidate f's are Mor(Y, ft(X)); beyond the square cap
  // the squares are deterministically sampled and the aggregate is marked
  // skipped, never silently passed.
  Budget square_budget = frag.budget;
  square_budget.pair_cap = std::min<std::uint64_t>(square_budget.pair_cap, 64);
  CheckReport agg{"pullback-universal"};
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    ObHandle ftx = cs->ft(x);
    for (ObHandle y : frag.objects) {
      const HomSet& fs = frag.hom(y, ftx);
      if (fs.truncated) ++agg.skipped_cases;
      std::uint64_t tag = 0x50 ^ (static_cast<std::uint64_t>(x.id) << 20) ^ y.id;
      bool sampled = detail::for_pairs(
          fs.mors.size(), 1, square_budget, tag, [&](std::uint64_t i, std::uint64_t) {
            CheckReport r = check_pullback_universal(*cs, fs.mors[i], x, frag);
            agg.cases += r.cases;
            agg.skipped_cases += r.skipped_cases;
            for (Counterexample& c : r.counterexamples)
              agg.add_counterexample("X=" + cs->ob_encoding(x) + " f=" +
                                         cs->mor_encoding(fs.mors[i]) + " " + c.input,
                                     std::move(c.expected), std::move(c.actual));
          });
      if (sampled) ++agg.skipped_cases;
    }
  }
  agg.finish();
  sr.checks.push_back(std::move(agg));
  sr.checks.push_back(check_sf_from_pullback(*cs, frag));
  return sr;
}

SuiteReport suite_subsystem(CSystemPtr cs, const SubsystemSeed& seed, std::uint32_t L,
                            const Fragment& frag) {
  SuiteReport sr{"subsystem", {}};
  SubsystemWindow w = close_window(*cs, seed, L);
  sr.checks.push_back(check_closed(*cs, w));
  for (CheckReport& r : verify_subsystem_lemmas(*cs, w, frag)) sr.checks.push_back(std::move(r));
  // Re-close from the window's own contents: the result must be the same
  // window, so determination applies to an equal pair.
  SubsystemSeed full{w.B, w.B_tilde};
  SubsystemWindow w2 = close_window(*cs, full, L);
  CheckReport idem{"subsystem/closure-idempotent"};
  idem.cases = 1;
  if (w2.b_ids != w.b_ids || w2.bt_ids != w.bt_ids)
    idem.add_counterexample("re-closure of the window contents", "the same window",
                            "a different window");
  idem.finish();
  sr.checks.push_back(std::move(idem));
  for (CheckReport& r : check_determination(*cs, w, w2, frag)) sr.checks.push_back(std::move(r));
  return sr;
}

SuiteReport suite_congruence(CSystemPtr cs, const RelationSeed& seed, const Fragment& frag) {
  SuiteReport sr{"congruence", {}};
  CheckReport closure{"congruence/closure"};
  closure.cases = 1;
  ObPartition ob;
  SectPartition sect;
  try {
    std::tie(ob, sect) = cong_close(*cs, seed, frag);
  } catch (const domain_error& e) {
    closure.add_counterexample("relation seed", "length-compatible pairs", e.what());
    closure.finish();
    sr.checks.push_back(std::move(closure));
    return sr;
  }
  closure.finish();
  sr.checks.push_back(std::move(closure));

  sr.checks.push_back(check_prop_conditions(*cs, ob, sect, frag));

  RegularCongruenceWindow rel;
  rel.ob = ob;
  rel.sect = sect;
  rel.mor = extend_to_mor(*cs, ob, sect, frag);
  rel.mor_populated = true;
  sr.checks.push_back(check_congruence_def(*cs, rel.ob, rel.mor, frag));

  CheckReport psi{"identity/projection-section"};
  for (ObHandle x : frag.objects)
    for (std::uint32_t i = 1; i < x.length; ++i) {
      ++psi.cases;
      if (!proj_section_identity(*cs, x, i))
        psi.add_counterexample("X=" + cs->ob_encoding(x) + " i=" + std::to_string(i),
                               "nested weakenings of the diagonal", "a different section");
    }
  psi.finish();
  sr.checks.push_back(std::move(psi));

  QuotientResult qr = build_quotient(*cs, rel, frag);
  sr.checks.push_back(qr.well_defined);

  // Axioms of the quotient instance, one level down so that every induced
  // operation stays inside the quotient's window.
  Budget qb = frag.budget;
  qb.max_len = qb.max_len > 1 ? qb.max_len - 1 : 1;
  try {
    Fragment qfrag = enumerate_fragment(qr.cs, qb);
    for (CheckReport& r : check_c0_axioms(*qr.cs, qfrag)) {
      r.name = "quotient/" + r.name;
      sr.checks.push_back(std::move(r));
    }
    for (CheckReport& r : check_s_axioms(*qr.cs, qfrag)) {
      r.name = "quotient/" + r.name;
      sr.checks.push_back(std::move(r));
    }
  } catch (const window_error& e) {
    CheckReport r{"quotient/axioms"};
    r.cases = 1;
    r.add_counterexample("quotient fragment one level down", "in-window evaluation", e.what());
    r.finish();
    sr.checks.push_back(std::move(r));
  }

  sr.checks.push_back(check_tilde_ob_quotient(*cs, rel, frag));
  sr.checks.push_back(roundtrip_injectivity(*cs, rel, frag));
  return sr;
}

std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;
  Budget b;
  b.max_len = 4;
  out.push_back({"unit", {{"kind", "unit"}}, b});
  b.max_len = 3;
  // The length-3 window has hom sets at the 4096 cap; quadratic sweeps are
  // sampled at this pair cap (and flagged skipped) to stay desk-scale.
  b.pair_cap = 8192;
  out.push_back({"context2", {{"kind", "context"}, {"base_sizes", {2}}}, b});
  b.pair_cap = Budget{}.pair_cap;
  b.max_len = 2;
  out.push_back({"context22", {{"kind", "context"}, {"base_sizes", {2, 2}}}, b});
  b.max_len = 2;
  out.push_back({"universe12", {{"kind", "universe"}, {"els", {1, 2}}}, b});
  return out;
}

std::vector<SubsystemSeed> default_subsystem_seeds(const CSystem& cs, const Fragment& frag) {
  std::vector<SubsystemSeed> seeds;
  seeds.push_back({});  // minimal: closes to {pt}
  SubsystemSeed s1;
  for (ObHandle x : frag.objects)
    if (x.length == 1) {
      s1.objects.push_back(x);
      break;
    }
  seeds.push_back(s1);
  seeds.push_back({frag.objects, {}});
  SubsystemSeed s3;
  for (ObHandle x : frag.objects)
    if (x.length == frag.budget.max_len) {
      s3.objects.push_back(x);
      break;
    }
  seeds.push_back(s3);
  SubsystemSeed s4;
  if (!frag.sections.empty()) s4.sections.push_back(frag.sections.front());
  seeds.push_back(s4);
  SubsystemSeed s5 = s3;
  if (!frag.sections.empty()) s5.sections.push_back(frag.sections.back());
  seeds.push_back(s5);
  return seeds;
}

RelationSeed collapse_kernel_seed(const CSystem& cs, const Fragment& frag) {
  RelationSeed seed;
  std::map<std::uint32_t, ObHandle> first_of_len;
  for (ObHandle x : carrier_obs(frag)) {
    auto [it, fresh] = first_of_len.emplace(x.length, x);
    if (!fresh) seed.ob_pairs.emplace_back(it->second, x);
  }
  std::map<std::pair<std::uint32_t, std::string>, Section> first_sect;
  for (const Section& s : frag.all_sections()) {
    std::string key_str = cs.mor_encoding(s.mor);
    nlohmann::json enc = nlohmann::json::parse(key_str, nullptr, false);
    if (enc.is_object() && enc.contains("table")) key_str = enc.at("table").dump();
    auto key = std::make_pair(s.target().length, key_str);
    auto [it, fresh] = first_sect.emplace(key, s);
    if (!fresh) seed.sect_pairs.emplace_back(it->second, s);
  }
  return seed;
}

std::vector<RelationSeed> default_relation_seeds(const CSystem& cs, const Fragment& frag) {
  std::vector<RelationSeed> seeds;
  seeds.push_back({});  // discrete
  // Only the product-style instances have the "collapse the base data"
  // kernel as an admissible congruence; on the dependent instance merging
  // equal-length objects with unequal fibers is not one.
  if (cs.kind() == "context") {
    RelationSeed kernel = collapse_kernel_seed(cs, frag);
    if (!kernel.ob_pairs.empty() || !kernel.sect_pairs.empty())
      seeds.push_back(std::move(kernel));
  }
  return seeds;
}

Budget BudgetOverrides::apply(Budget b) const {
  if (max_len) b.max_len = *max_len;
  if (point_cap) b.point_cap = *point_cap;
  if (hom_cap) b.hom_cap = *hom_cap;
  if (rng_seed) b.rng_seed = *rng_seed;
  return b;
}

std::vector<SuiteReport> run_fixture_suites(const Fixture& f) {
  std::vector<SuiteReport> out;
  CSystemPtr cs = make_instance(f.instance_config);
  Fragment frag = enumerate_fragment(cs, f.budget);

  auto add = [&](SuiteReport sr) {
    sr.suite = f.name + "/" + sr.suite;
    out.push_back(std::move(sr));
  };
  add(suite_c0_c(cs, frag));
  add(suite_prop_pullback(cs, frag));
  std::vector<SubsystemSeed> sseeds = default_subsystem_seeds(*cs, frag);
  for (std::size_t i = 0; i < sseeds.size(); ++i) {
    SuiteReport sr = suite_subsystem(cs, sseeds[i], f.budget.max_len, frag);
    sr.suite += "-" + std::to_string(i);
    add(std::move(sr));
  }
  std::vector<RelationSeed> rseeds = default_relation_seeds(*cs, frag);
  for (std::size_t i = 0; i < rseeds.size(); ++i) {
    SuiteReport sr = suite_congruence(cs, rseeds[i], frag);
    sr.suite += i == 0 ? "-discrete" : "-collapse";
    add(std::move(sr));
  }
  return out;
}

std::vector<SuiteReport> run_all_suites(const BudgetOverrides& o) {
  std::vector<SuiteReport> out;
  for (Fixture f : fixtures()) {
    f.budget = o.apply(f.budget);
    for (SuiteReport& sr : run_fixture_suites(f)) out.push_back(std::move(sr));
  }
  return out;
}

bool all_ok(const std::vector<SuiteReport>& suites) {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteReport& sr) { return sr.ok(); });
}

nlohmann::json suites_to_json(const std::vector<SuiteReport>& suites) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t pass = 0, fail = 0, skipped = 0;
  for (const SuiteReport& sr : suites) {
    arr.push_back(suite_report_to_json(sr));
    pass += sr.passed();
    fail += sr.failed();
    skipped += sr.skipped();
  }
  return {{"suites", std::move(arr)},
          {"totals", {{"pass", pass}, {"fail", fail}, {"skipped", skipped}}}};
}

std::string suites_to_text(const std::vector<SuiteReport>& suites) {
  std::ostringstream os;
  std::size_t pass = 0, fail = 0, skipped = 0;
  for (const SuiteReport& sr : suites) {
    os << suite_report_to_text(sr);
    pass += sr.passed();
    fail += sr.failed();
    skipped += sr.skipped();
  }
  os << "totals: " << pass << " pass, " << fail << " fail, " << skipped << " skipped\n";
  return os.str();
}

}  // namespace csys
