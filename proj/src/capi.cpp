#include "csys/capi.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "csys/checker.hpp"
#include "csys/congruence.hpp"
#include "csys/instances.hpp"
#include "csys/subsystems.hpp"

using namespace csys;

struct csys_instance {
  CSystemPtr cs;
};

namespace {

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

nlohmann::json parse_or_throw(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return nlohmann::json::object();
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw domain_error(std::string(what) + ": malformed JSON");
  return j;
}

Budget budget_from_json(const nlohmann::json& j) {
  Budget b;
  b.max_len = j.value("max_len", b.max_len);
  b.point_cap = j.value("point_cap", b.point_cap);
  b.hom_cap = j.value("hom_cap", b.hom_cap);
  b.rng_seed = j.value("rng_seed", b.rng_seed);
  return b;
}

BudgetOverrides overrides_from_json(const nlohmann::json& j) {
  BudgetOverrides o;
  if (j.contains("max_len")) o.max_len = j.at("max_len").get<std::uint32_t>();
  if (j.contains("point_cap")) o.point_cap = j.at("point_cap").get<std::uint64_t>();
  if (j.contains("hom_cap")) o.hom_cap = j.at("hom_cap").get<std::uint64_t>();
  if (j.contains("rng_seed")) o.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return o;
}

std::string render(const std::vector<SuiteReport>& suites, int format) {
  if (format == CSYS_FORMAT_JSON) return suites_to_json(suites).dump(2) + "\n";
  return suites_to_text(suites);
}

int finish(const std::vector<SuiteReport>& suites, int format, char** out) {
  set_out(out, render(suites, format));
  return all_ok(suites) ? CSYS_OK : CSYS_CHECK_FAILED;
}

/// Class representatives and induced operation tables of the quotient,
/// enumerated one level below the window so every operation is defined.
nlohmann::json quotient_dump(const CSystem& base, CSystemPtr q, const Budget& b) {
  Budget qb = b;
  qb.max_len = qb.max_len > 1 ? qb.max_len - 1 : 1;
  Fragment qfrag = enumerate_fragment(q, qb);
  nlohmann::json objs = nlohmann::json::array();
  for (ObHandle x : qfrag.objects)
    objs.push_back({{"encoding", q->ob_encoding(x)},
                    {"length", x.length},
                    {"ft", q->ob_encoding(q->ft(x))}});
  nlohmann::json homs = nlohmann::json::array();
  for (const auto& [key, hs] : qfrag.homs) {
    nlohmann::json mors = nlohmann::json::array();
    for (MorHandle m : hs.mors) {
      nlohmann::json e = {{"encoding", q->mor_encoding(m)}};
      if (m.tgt.length > 0) e["sf"] = q->mor_encoding(q->section_of(m).mor);
      mors.push_back(std::move(e));
    }
    ObHandle ysrc = hs.mors.empty() ? ObHandle{} : hs.mors.front().src;
    ObHandle xtgt = hs.mors.empty() ? ObHandle{} : hs.mors.front().tgt;
    homs.push_back({{"src", hs.mors.empty() ? "" : q->ob_encoding(ysrc)},
                    {"tgt", hs.mors.empty() ? "" : q->ob_encoding(xtgt)},
                    {"truncated", hs.truncated},
                    {"mors", std::move(mors)}});
  }
  nlohmann::json sects = nlohmann::json::array();
  for (const Section& s : qfrag.sections) sects.push_back(q->mor_encoding(s.mor));
  (void)base;
  return {{"max_len", qb.max_len},
          {"objects", std::move(objs)},
          {"homs", std::move(homs)},
          {"sections", std::move(sects)}};
}

template <typename Fn>
int guarded(char** err, Fn&& fn) {
  try {
    return fn();
  } catch (const domain_error& e) {
    if (err) *err = dup_string(e.what());
    return CSYS_PARSE_ERROR;
  } catch (const std::exception& e) {
    if (err) *err = dup_string(e.what());
    return CSYS_INTERNAL_ERROR;
  } catch (...) {
    if (err) *err = dup_string("unknown error");
    return CSYS_INTERNAL_ERROR;
  }
}

}  // namespace

extern "C" {

const char* csys_version(void) { return "0.1.0"; }

csys_instance* csys_instance_create(const char* config_json, char** err) {
  csys_instance* inst = nullptr;
  int rc = guarded(err, [&]() {
    nlohmann::json cfg = parse_or_throw(config_json, "instance config");
    CSystemPtr cs = make_instance(cfg);  // throws domain_error on bad config
    inst = new csys_instance{std::move(cs)};
    return CSYS_OK;
  });
  (void)rc;
  return inst;
}

void csys_instance_destroy(csys_instance* inst) { delete inst; }

int csys_run_check(csys_instance* inst, const char* budget_json, int format, char** out,
                   char** err) {
  if (!inst) return CSYS_PARSE_ERROR;
  return guarded(err, [&]() {
    Budget b = budget_from_json(parse_or_throw(budget_json, "budget"));
    Fragment frag = enumerate_fragment(inst->cs, b);
    std::vector<SuiteReport> suites;
    suites.push_back(suite_c0_c(inst->cs, frag));
    suites.push_back(suite_prop_pullback(inst->cs, frag));
    return finish(suites, format, out);
  });
}

int csys_run_close(csys_instance* inst, const char* budget_json, const char* seed_json,
                   int format, char** out, char** err) {
  if (!inst) return CSYS_PARSE_ERROR;
  return guarded(err, [&]() {
    Budget b = budget_from_json(parse_or_throw(budget_json, "budget"));
    SubsystemSeed seed = seed_from_json(*inst->cs, parse_or_throw(seed_json, "seed"));
    Fragment frag = enumerate_fragment(inst->cs, b);
    SubsystemWindow w = close_window(*inst->cs, seed, b.max_len);
    std::vector<SuiteReport> suites{suite_subsystem(inst->cs, seed, b.max_len, frag)};
    if (format == CSYS_FORMAT_JSON) {
      nlohmann::json j = {{"window", window_to_json(*inst->cs, w)},
                          {"suites", suites_to_json(suites)}};
      set_out(out, j.dump(2) + "\n");
    } else {
      std::ostringstream os;
      os << "window: " << window_to_json(*inst->cs, w).dump() << "\n"
         << suites_to_text(suites);
      set_out(out, os.str());
    }
    return all_ok(suites) ? CSYS_OK : CSYS_CHECK_FAILED;
  });
}

int csys_run_quotient(csys_instance* inst, const char* budget_json, const char* relation_json,
                      int format, char** out, char** err) {
  if (!inst) return CSYS_PARSE_ERROR;
  return guarded(err, [&]() {
    Budget b = budget_from_json(parse_or_throw(budget_json, "budget"));
    RelationSeed seed = relation_from_json(*inst->cs, parse_or_throw(relation_json, "relation"));
    Fragment frag = enumerate_fragment(inst->cs, b);
    std::vector<SuiteReport> suites{suite_congruence(inst->cs, seed, frag)};
    nlohmann::json dump;
    bool have_dump = false;
    try {
      auto [ob, sect] = cong_close(*inst->cs, seed, frag);
      RegularCongruenceWindow rel;
      rel.ob = ob;
      rel.sect = sect;
      rel.mor = extend_to_mor(*inst->cs, ob, sect, frag);
      rel.mor_populated = true;
      QuotientResult qr = build_quotient(*inst->cs, rel, frag);
      dump = quotient_dump(*inst->cs, qr.cs, b);
      have_dump = true;
    } catch (const domain_error&) {
      // Inadmissible seed: the suite above already reports the failure.
    }
    if (format == CSYS_FORMAT_JSON) {
      nlohmann::json j = {{"suites", suites_to_json(suites)}};
      j["quotient"] = have_dump ? dump : nlohmann::json();
      set_out(out, j.dump(2) + "\n");
    } else {
      std::ostringstream os;
      os << suites_to_text(suites);
      if (have_dump) os << "quotient: " << dump.dump() << "\n";
      set_out(out, os.str());
    }
    return all_ok(suites) ? CSYS_OK : CSYS_CHECK_FAILED;
  });
}

int csys_run_suite_all(const char* budget_json, int format, char** out, char** err) {
  return guarded(err, [&]() {
    BudgetOverrides o = overrides_from_json(parse_or_throw(budget_json, "budget"));
    std::vector<SuiteReport> suites = run_all_suites(o);
    return finish(suites, format, out);
  });
}

void csys_free(char* p) { std::free(p); }

}  // extern "C"
