// Acceptance gate: one line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csys/checker.hpp"
#include "csys/congruence.hpp"
#include "csys/instances.hpp"
#include "csys/kernel.hpp"
#include "csys/subsystems.hpp"

using namespace csys;

namespace {

struct FixtureRun {
  Fixture fixture;
  CSystemPtr cs;
  Fragment frag;
};

std::vector<FixtureRun> load_fixtures() {
  std::vector<FixtureRun> out;
  for (const Fixture& f : fixtures()) {
    CSystemPtr cs = make_instance(f.instance_config);
    Fragment frag = enumerate_fragment(cs, f.budget);
    out.push_back({f, cs, std::move(frag)});
  }
  return out;
}

bool zero_counterexamples(const SuiteReport& sr, std::string& why) {
  for (const CheckReport& r : sr.checks) {
    if (!r.counterexamples.empty()) {
      const Counterexample& c = r.counterexamples.front();
      why = sr.suite + "/" + r.name + ": input=" + c.input + " expected=" + c.expected +
            " actual=" + c.actual;
      return false;
    }
  }
  return true;
}

int g_failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << " - " << what << "\n";
  if (!ok) ++g_failures;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  std::vector<FixtureRun> runs = load_fixtures();

  // 1. Structural axiom suite on all four fixtures, zero counterexamples,
  //    under sixty seconds.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string why = "axiom suites pass on unit, context2, context22, universe12";
    for (const FixtureRun& fr : runs) {
      SuiteReport sr = suite_c0_c(fr.cs, fr.frag);
      std::string detail;
      if (!sr.ok() || !zero_counterexamples(sr, detail)) {
        ok = false;
        why = fr.fixture.name + ": " + detail;
      }
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    if (secs >= 60) {
      ok = false;
      why = "runtime " + std::to_string(secs) + "s exceeds 60s";
    } else {
      why += " in " + std::to_string(secs) + "s";
    }
    report(1, ok, why);
  }

  // 2. Canonical squares are pullbacks and determine the section operation:
  //    filler existence/uniqueness by scan, agreement with the solved
  //    filler, agreement of the reconstructed s_f; exact equality.
  {
    bool ok = true;
    std::string why = "pullback equivalence exact on every fixture";
    std::uint64_t cases = 0;
    for (const FixtureRun& fr : runs) {
      SuiteReport sr = suite_prop_pullback(fr.cs, fr.frag);
      std::string detail;
      if (!sr.ok() || !zero_counterexamples(sr, detail)) {
        ok = false;
        why = fr.fixture.name + ": " + detail;
        break;
      }
      for (const CheckReport& r : sr.checks) {
        cases += r.cases;
        if (r.cases == 0) {
          ok = false;
          why = fr.fixture.name + "/" + r.name + ": no cases exercised";
        }
      }
    }
    if (ok) why += " (" + std::to_string(cases) + " cases)";
    report(2, ok, why);
  }

  // 3. Subsystem closure, lemmas and determination for at least five
  //    deterministic seeds per fixture, zero counterexamples.
  {
    bool ok = true;
    std::string why;
    std::size_t suites = 0;
    for (const FixtureRun& fr : runs) {
      std::vector<SubsystemSeed> seeds = default_subsystem_seeds(*fr.cs, fr.frag);
      if (seeds.size() < 5) {
        ok = false;
        why = fr.fixture.name + ": fewer than five seeds";
        break;
      }
      for (const SubsystemSeed& seed : seeds) {
        SuiteReport sr = suite_subsystem(fr.cs, seed, fr.fixture.budget.max_len, fr.frag);
        ++suites;
        std::string detail;
        if (!sr.ok() || !zero_counterexamples(sr, detail)) {
          ok = false;
          why = fr.fixture.name + ": " + detail;
        }
      }
    }
    if (ok)
      why = "closure + lemmas + determination pass for " + std::to_string(suites) +
            " seed windows";
    report(3, ok, why);
  }

  // 4. The section of every iterated projection equals the nested
  //    weakening of the diagonal, for every (X, i) in every fixture.
  {
    bool ok = true;
    std::uint64_t cases = 0;
    std::string why;
    for (const FixtureRun& fr : runs)
      for (ObHandle x : fr.frag.objects)
        for (std::uint32_t i = 1; i < x.length; ++i) {
          ++cases;
          if (!proj_section_identity(*fr.cs, x, i)) {
            ok = false;
            why = fr.fixture.name + ": X=" + fr.cs->ob_encoding(x) + " i=" + std::to_string(i);
          }
        }
    if (cases == 0) {
      ok = false;
      why = "no (X, i) pairs exercised";
    }
    if (ok) why = "exact equality for all " + std::to_string(cases) + " (X, i) pairs";
    report(4, ok, why);
  }

  // 5. Congruence pipeline end-to-end for the discrete and base-collapse
  //    relations on the [2,2] context instance; the collapse quotient's
  //    fragment matches the [2] context instance's by canonical encodings.
  {
    bool ok = true;
    std::string why;
    CSystemPtr cs22 = make_instance({{"kind", "context"}, {"base_sizes", {2, 2}}});
    Budget b2;
    b2.max_len = 2;
    Fragment f22 = enumerate_fragment(cs22, b2);
    RelationSeed kernel = collapse_kernel_seed(*cs22, f22);
    RelationSeed discrete;
    for (const RelationSeed* seed : {&discrete, &kernel}) {
      SuiteReport sr = suite_congruence(cs22, *seed, f22);
      std::string detail;
      if (!sr.ok() || !zero_counterexamples(sr, detail)) {
        ok = false;
        why = detail;
      }
    }
    if (ok) {
      auto closed = cong_close(*cs22, kernel, f22);
      RegularCongruenceWindow rel;
      rel.ob = closed.first;
      rel.sect = closed.second;
      rel.mor = extend_to_mor(*cs22, closed.first, closed.second, f22);
      rel.mor_populated = true;
      QuotientResult qr = build_quotient(*cs22, rel, f22);
      Fragment fq = enumerate_fragment(qr.cs, b2);
      CSystemPtr cs2 = make_instance({{"kind", "context"}, {"base_sizes", {2}}});
      Fragment f2 = enumerate_fragment(cs2, b2);

      std::set<std::string> obq, ob2;
      for (ObHandle x : fq.objects) obq.insert(qr.cs->ob_encoding(x));
      for (ObHandle x : f2.objects) ob2.insert(cs2->ob_encoding(x));
      if (obq != ob2) {
        ok = false;
        why = "quotient object encodings differ from the [2] context instance";
      }
      std::map<std::pair<std::string, std::string>, std::set<std::string>> hq, h2;
      for (ObHandle y : fq.objects)
        for (ObHandle x : fq.objects)
          for (MorHandle m : fq.hom(y, x).mors)
            hq[{qr.cs->ob_encoding(y), qr.cs->ob_encoding(x)}].insert(qr.cs->mor_encoding(m));
      for (ObHandle y : f2.objects)
        for (ObHandle x : f2.objects)
          for (MorHandle m : f2.hom(y, x).mors)
            h2[{cs2->ob_encoding(y), cs2->ob_encoding(x)}].insert(cs2->mor_encoding(m));
      if (ok && hq != h2) {
        ok = false;
        why = "quotient hom encodings differ from the [2] context instance";
      }
      if (ok)
        why = "discrete and collapse pipelines pass; collapse quotient fragment matches the "
              "[2] context instance";
    }
    report(5, ok, why);
  }

  // 6. Mutation sensitivity: six single-table corruptions, each caught
  //    with a concrete counterexample.
  {
    bool ok = true;
    std::string why;
    std::vector<std::string> caught;

    auto record = [&](const std::string& name, bool found, const std::string& detail) {
      if (found) {
        caught.push_back(name);
      } else {
        ok = false;
        why = name + " not caught: " + detail;
      }
    };

    Budget b2;
    b2.max_len = 2;
    for (const char* mutation : {"permute_q", "permute_sf", "permute_star", "permute_comp"}) {
      nlohmann::json cfg = {{"kind", "mutated"},
                            {"base", {{"kind", "context"}, {"base_sizes", {2, 2}}}},
                            {"mutation", mutation}};
      CSystemPtr mcs = make_instance(cfg);
      Fragment mfrag = enumerate_fragment(mcs, b2);
      SuiteReport sr = suite_c0_c(mcs, mfrag);
      std::string detail;
      bool found = !zero_counterexamples(sr, detail);
      if (!found) {
        SuiteReport sp = suite_prop_pullback(mcs, mfrag);
        found = !zero_counterexamples(sp, detail);
      }
      record(mutation, found, "all axiom and pullback checks passed");
    }

    {
      // Dropped section: remove a B-tilde element from a closed window.
      CSystemPtr ucs = make_instance({{"kind", "unit"}});
      SubsystemSeed seed;
      seed.objects.push_back(*ucs->ob_from_encoding("1"));
      SubsystemWindow w = close_window(*ucs, seed, 3);
      bool found = false;
      if (!w.B_tilde.empty()) {
        w.bt_ids.erase(w.B_tilde.front().mor.id);
        w.B_tilde.erase(w.B_tilde.begin());
        CheckReport rep = check_closed(*ucs, w);
        found = !rep.counterexamples.empty();
      }
      record("dropped-section-window", found, "check_closed reported no counterexample");
    }

    {
      // Merged object pair without merged sections: the presentation
      // conditions must reject it.
      CSystemPtr cs22 = make_instance({{"kind", "context"}, {"base_sizes", {2, 2}}});
      Fragment f22 = enumerate_fragment(cs22, b2);
      RelationSeed seed;
      seed.ob_pairs.emplace_back(*cs22->ob_from_encoding("[0]"), *cs22->ob_from_encoding("[1]"));
      auto closed = cong_close(*cs22, seed, f22);
      CheckReport rep = check_prop_conditions(*cs22, closed.first, closed.second, f22);
      record("merge-without-sections", !rep.counterexamples.empty(),
             "presentation conditions reported no counterexample");
    }

    if (ok)
      why = std::to_string(caught.size()) + " mutations caught with concrete counterexamples";
    report(6, ok, why);
  }

  // 7. Two consecutive full-suite CLI runs produce byte-identical JSON.
  {
    bool ok = true;
    std::string why;
    const char* cli = std::getenv("CSYS_CLI");
    const char* tmp = std::getenv("CSYS_TMP");
    if (!cli || !tmp) {
      ok = false;
      why = "CSYS_CLI / CSYS_TMP not set";
    } else {
      std::string f1 = std::string(tmp) + "/acceptance_suite_all_1.json";
      std::string f2 = std::string(tmp) + "/acceptance_suite_all_2.json";
      for (const std::string& f : {f1, f2}) {
        std::string cmd = std::string(cli) + " suite-all --format json --out " + f +
                          " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        if (rc == -1 || WEXITSTATUS(rc) != 0) {
          ok = false;
          why = "suite-all exited with " + std::to_string(rc == -1 ? -1 : WEXITSTATUS(rc));
        }
      }
      if (ok) {
        std::string a = read_file(f1);
        std::string b = read_file(f2);
        if (a.empty() || a != b) {
          ok = false;
          why = "reports differ or are empty";
        } else {
          why = "byte-identical reports (" + std::to_string(a.size()) + " bytes)";
        }
      }
    }
    report(7, ok, why);
  }

  return g_failures == 0 ? 0 : 1;
}
