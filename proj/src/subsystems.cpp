#include "csys/subsystems.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace csys {

namespace {

struct Builder {
  const CSystem& cs;
  std::uint32_t L;

  std::vector<ObHandle> obs;     // insertion order
  std::vector<Section> sects;    // insertion order
  std::set<std::uint32_t> ob_ids;
  std::set<std::uint32_t> sect_ids;
  std::set<std::string> frontier;

  struct Item {
    bool is_ob;
    ObHandle x;
    Section s;
  };
  std::deque<Item> queue;

  void add_ob(ObHandle x) {
    if (x.length > L) {
      frontier.insert("ob " + cs.ob_encoding(x));
      return;
    }
    if (!ob_ids.insert(x.id).second) return;
    obs.push_back(x);
    queue.push_back({true, x, {}});
  }

  void add_sect(const Section& s) {
    if (s.target().length > L) {
      frontier.insert("section " + cs.mor_encoding(s.mor));
      return;
    }
    if (!sect_ids.insert(s.mor.id).second) return;
    sects.push_back(s);
    queue.push_back({false, {}, s});
  }

  void try_Tt(ObHandle y, const Section& r) {
    if (y.length == 0) return;
    // target length is l(target(r)) + 1; skip the heavy op past the window
    if (r.target().length + 1 > L) {
      if (level_offset(cs, y, r.target()))
        frontier.insert("Tt(" + cs.ob_encoding(y) + ", " + cs.mor_encoding(r.mor) + ")");
      return;
    }
    try {
      add_sect(op_Tt(cs, y, r));
    } catch (const domain_error&) {
    }
  }

  void try_St(const Section& s, const Section& r) {
    try {
      add_sect(op_St(cs, s, r));  // target shrinks, always in window
    } catch (const domain_error&) {
    }
  }

  // Object-level weakening and substitution are consequences of the pair
  // conditions in the unwindowed closure, but their usual derivation runs
  // through sections one level higher; applying them directly keeps the
  // window closed under base change along member morphisms.
  void try_T(ObHandle y, ObHandle x) {
    if (y.length == 0 || x.length == 0) return;
    if (!level_offset(cs, y, x)) return;
    if (x.length + 1 > L) {
      frontier.insert("T(" + cs.ob_encoding(y) + ", " + cs.ob_encoding(x) + ")");
      return;
    }
    try {
      add_ob(op_T(cs, y, x));
    } catch (const domain_error&) {
    }
  }

  void try_S(const Section& s, ObHandle x) {
    if (x.length < 2) return;
    try {
      add_ob(op_S(cs, s, x));  // result shrinks, always in window
    } catch (const domain_error&) {
    }
  }

  void run() {
    while (!queue.empty()) {
      Item it = queue.front();
      queue.pop_front();
      if (it.is_ob) {
        ObHandle x = it.x;
        if (x.length > 0) {
          add_ob(cs.ft(x));
          if (x.length + 1 > L)
            frontier.insert("delta(" + cs.ob_encoding(x) + ")");
          else
            add_sect(op_delta(cs, x));
        }
        for (std::size_t i = 0; i < sects.size(); ++i) {
          try_Tt(x, sects[i]);
          try_S(sects[i], x);
        }
        for (std::size_t i = 0; i < obs.size(); ++i) {
          try_T(x, obs[i]);
          try_T(obs[i], x);
        }
      } else {
        Section s = it.s;
        add_ob(s.target());
        for (std::size_t i = 0; i < obs.size(); ++i) {
          try_Tt(obs[i], s);
          try_S(s, obs[i]);
        }
        for (std::size_t i = 0; i < sects.size(); ++i) {
          try_St(s, sects[i]);
          try_St(sects[i], s);
        }
      }
    }
  }
};

void sort_window(const CSystem& cs, SubsystemWindow& w) {
  std::sort(w.B.begin(), w.B.end(), [&](ObHandle a, ObHandle b) {
    if (a.length != b.length) return a.length < b.length;
    return cs.ob_encoding(a) < cs.ob_encoding(b);
  });
  std::sort(w.B_tilde.begin(), w.B_tilde.end(), [&](const Section& a, const Section& b) {
    if (a.target().length != b.target().length) return a.target().length < b.target().length;
    return cs.mor_encoding(a.mor) < cs.mor_encoding(b.mor);
  });
}

/// Membership with memoisation; the windows in one verification run are
/// immutable so caching per (window, mor) is sound.
struct MemberCache {
  const CSystem& cs;
  const SubsystemWindow& w;
  std::map<std::uint32_t, Membership> memo;

  Membership get(MorHandle f) {
    auto it = memo.find(f.id);
    if (it != memo.end()) return it->second;
    Membership m = mor_member(cs, f, w);
    memo.emplace(f.id, m);
    return m;
  }
};

}  // namespace

SubsystemWindow close_window(const CSystem& cs, const SubsystemSeed& seed, std::uint32_t L) {
  Builder b{cs, L};
  b.add_ob(cs.pt());
  for (ObHandle x : seed.objects) b.add_ob(x);
  for (const Section& s : seed.sections) {
    if (!cs.is_section(s.mor)) throw domain_error("seed element is not a section");
    b.add_sect(s);
  }
  b.run();

  SubsystemWindow w;
  w.L = L;
  w.B = std::move(b.obs);
  w.B_tilde = std::move(b.sects);
  w.b_ids = std::move(b.ob_ids);
  w.bt_ids = std::move(b.sect_ids);
  w.frontier.assign(b.frontier.begin(), b.frontier.end());
  w.saturated_within_window = true;
  sort_window(cs, w);
  return w;
}

CheckReport check_closed(const CSystem& cs, const SubsystemWindow& w) {
  CheckReport rep;
  rep.name = "subsystem/closed";

  rep.cases++;
  if (!w.contains(cs.pt()))
    rep.add_counterexample("condition 1", "pt in B", "missing");

  for (ObHandle x : w.B) {
    if (x.length == 0) continue;
    rep.cases++;
    if (!w.contains(cs.ft(x)))
      rep.add_counterexample("condition 2: X=" + cs.ob_encoding(x), "ft(X) in B", "missing");
    if (x.length + 1 > w.L) {
      rep.skipped_cases++;
    } else {
      rep.cases++;
      if (!w.contains(op_delta(cs, x)))
        rep.add_counterexample("condition 6: X=" + cs.ob_encoding(x), "delta(X) in B~",
                               "missing");
    }
  }

  for (const Section& s : w.B_tilde) {
    rep.cases++;
    if (!w.contains(s.target()))
      rep.add_counterexample("condition 3: s=" + cs.mor_encoding(s.mor), "target(s) in B",
                             "missing");
  }

  for (ObHandle y : w.B) {
    if (y.length == 0) continue;
    for (const Section& r : w.B_tilde) {
      if (!level_offset(cs, y, r.target())) continue;
      if (r.target().length + 1 > w.L) {
        rep.skipped_cases++;
        continue;
      }
      Section t;
      try {
        t = op_Tt(cs, y, r);
      } catch (const domain_error&) {
        continue;
      }
      rep.cases++;
      if (!w.contains(t))
        rep.add_counterexample(
            "condition 4: Y=" + cs.ob_encoding(y) + ", r=" + cs.mor_encoding(r.mor),
            "Tt(Y, r) in B~", "missing: " + cs.mor_encoding(t.mor));
    }
  }

  for (const Section& s : w.B_tilde) {
    for (const Section& r : w.B_tilde) {
      Section t;
      try {
        t = op_St(cs, s, r);
      } catch (const domain_error&) {
        continue;
      }
      rep.cases++;
      if (!w.contains(t))
        rep.add_counterexample(
            "condition 5: s=" + cs.mor_encoding(s.mor) + ", r=" + cs.mor_encoding(r.mor),
            "St(s, r) in B~", "missing: " + cs.mor_encoding(t.mor));
    }
  }

  rep.finish();
  return rep;
}

Membership mor_member(const CSystem& cs, MorHandle f, const SubsystemWindow& w) {
  if (f.tgt.length == 0) return w.contains(f.src) ? Membership::Yes : Membership::No;
  if (!w.contains(f.tgt)) return Membership::No;
  if (f.src.length + 1 > w.L) return Membership::Overflow;
  if (!w.contains(cs.section_of(f))) return Membership::No;
  return mor_member(cs, ft_mor(cs, f), w);
}

std::vector<CheckReport> verify_subsystem_lemmas(const CSystem& cs, const SubsystemWindow& w,
                                                 const Fragment& frag) {
  std::vector<CheckReport> out;
  MemberCache cache{cs, w, {}};

  // Member morphisms of the fragment, grouped for the pairwise lemmas.
  std::vector<MorHandle> members;
  std::uint64_t member_overflow = 0;
  for (const auto& [key, hs] : frag.homs) {
    for (MorHandle f : hs.mors) {
      Membership m = cache.get(f);
      if (m == Membership::Yes) members.push_back(f);
      if (m == Membership::Overflow) member_overflow++;
    }
  }
  std::map<std::uint32_t, std::vector<MorHandle>> members_by_tgt;
  std::map<std::uint32_t, std::vector<MorHandle>> members_by_src;
  for (MorHandle f : members) {
    members_by_tgt[f.tgt.id].push_back(f);
    members_by_src[f.src.id].push_back(f);
  }
  // The pairwise lemmas quantify over products of hom sets; keep their own
  // tighter sampling cap so large fixtures stay tractable.
  Budget pair_budget = frag.budget;
  pair_budget.pair_cap = std::min<std::uint64_t>(pair_budget.pair_cap, 4096);

  {
    CheckReport rep;
    rep.name = "subsystem/lemma-projections";
    for (ObHandle x : w.B) {
      for (std::uint32_t i = 1; i <= x.length; ++i) {
        rep.cases++;
        Membership m = cache.get(proj_iter(cs, x, i));
        if (m == Membership::Overflow)
          rep.skipped_cases++;
        else if (m == Membership::No)
          rep.add_counterexample("X=" + cs.ob_encoding(x) + ", i=" + std::to_string(i),
                                 "p_{X,i} is a member", "not a member");
      }
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  {
    CheckReport rep;
    rep.name = "subsystem/lemma-section-pullback";
    for (const Section& r : w.B_tilde) {
      ObHandle x = r.target();
      for (std::uint32_t i = 1; i <= x.length; ++i) {
        ObHandle base = ft_iter(cs, x, i);
        auto it = members_by_tgt.find(base.id);
        if (it == members_by_tgt.end()) continue;
        for (MorHandle f : it->second) {
          rep.cases++;
          if (f.src.length + i > w.L) {
            rep.skipped_cases++;
            continue;
          }
          Section t = sect_pull(cs, f, r, i);
          if (!w.contains(t))
            rep.add_counterexample("r=" + cs.mor_encoding(r.mor) +
                                       ", f=" + cs.mor_encoding(f) + ", i=" + std::to_string(i),
                                   "f*(r, i) in B~", "missing: " + cs.mor_encoding(t.mor));
        }
      }
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  {
    CheckReport rep;
    rep.name = "subsystem/lemma-composition";
    rep.skipped_cases += member_overflow;
    for (const auto& [mid, gs] : members_by_src) {
      auto it = members_by_tgt.find(mid);
      if (it == members_by_tgt.end()) continue;
      const auto& fs = it->second;
      bool sampled = detail::for_pairs(
          fs.size(), gs.size(), pair_budget, 0x5u ^ mid,
          [&](std::uint64_t i, std::uint64_t j) {
            rep.cases++;
            Membership m = cache.get(cs.compose(fs[i], gs[j]));
            if (m == Membership::Overflow)
              rep.skipped_cases++;
            else if (m == Membership::No)
              rep.add_counterexample(
                  "f=" + cs.mor_encoding(fs[i]) + ", g=" + cs.mor_encoding(gs[j]),
                  "f . g is a member", "not a member");
          });
      if (sampled) rep.skipped_cases++;
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  {
    CheckReport rep;
    rep.name = "subsystem/lemma-base-change";
    for (ObHandle x : w.B) {
      if (x.length == 0) continue;
      auto it = members_by_tgt.find(cs.ft(x).id);
      if (it == members_by_tgt.end()) continue;
      for (MorHandle f : it->second) {
        rep.cases++;
        if (f.src.length + 1 > w.L) {
          rep.skipped_cases++;
          continue;
        }
        ObHandle st = cs.star(f, x);
        if (!w.contains(st)) {
          rep.add_counterexample("f=" + cs.mor_encoding(f) + ", X=" + cs.ob_encoding(x),
                                 "f*X in B", "missing: " + cs.ob_encoding(st));
          continue;
        }
        Membership m = cache.get(cs.q_map(f, x));
        if (m == Membership::Overflow)
          rep.skipped_cases++;
        else if (m == Membership::No)
          rep.add_counterexample("f=" + cs.mor_encoding(f) + ", X=" + cs.ob_encoding(x),
                                 "q(f, X) is a member", "not a member");
      }
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  {
    CheckReport rep;
    rep.name = "subsystem/lemma-pullback-reflects";
    for (ObHandle x : w.B) {
      if (x.length == 0) continue;
      auto it = members_by_tgt.find(cs.ft(x).id);
      if (it == members_by_tgt.end()) continue;
      for (MorHandle f : it->second) {
        if (f.src.length + 1 > w.L) {
          rep.skipped_cases++;
          continue;
        }
        ObHandle st = cs.star(f, x);
        if (!frag.has_object(st)) {
          rep.skipped_cases++;
          continue;
        }
        MorHandle p_st = cs.proj(st);
        MorHandle q = cs.q_map(f, x);
        for (ObHandle z : w.B) {
          auto hit = frag.homs.find({z.id, st.id});
          if (hit == frag.homs.end()) continue;
          const HomSet& hs = hit->second;
          if (hs.truncated) rep.skipped_cases++;
          bool sampled = detail::for_pairs(
              hs.mors.size(), 1, pair_budget, 0x6u ^ st.id ^ (z.id << 8),
              [&](std::uint64_t i, std::uint64_t) {
                MorHandle g = hs.mors[i];
                Membership leg1 = cache.get(cs.compose(g, p_st));
                Membership leg2 = cache.get(cs.compose(g, q));
                if (leg1 == Membership::Overflow || leg2 == Membership::Overflow) {
                  rep.skipped_cases++;
                  return;
                }
                if (leg1 != Membership::Yes || leg2 != Membership::Yes) return;
                rep.cases++;
                Membership m = cache.get(g);
                if (m == Membership::Overflow)
                  rep.skipped_cases++;
                else if (m == Membership::No)
                  rep.add_counterexample(
                      "g=" + cs.mor_encoding(g) + ", square of f=" + cs.mor_encoding(f) +
                          ", X=" + cs.ob_encoding(x),
                      "g is a member (both legs are)", "not a member");
              });
          if (sampled) rep.skipped_cases++;
        }
      }
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  return out;
}

std::vector<CheckReport> check_determination(const CSystem& cs, const SubsystemWindow& w1,
                                             const SubsystemWindow& w2, const Fragment& frag) {
  std::vector<CheckReport> out;

  {
    CheckReport rep;
    rep.name = "subsystem/determination-mor";
    if (w1.L != w2.L || w1.b_ids != w2.b_ids || w1.bt_ids != w2.bt_ids) {
      rep.skipped_cases++;  // pairs are not (B, B~)-equal, nothing to compare
    } else {
      for (const auto& [key, hs] : frag.homs) {
        for (MorHandle f : hs.mors) {
          rep.cases++;
          Membership a = mor_member(cs, f, w1);
          Membership b = mor_member(cs, f, w2);
          if (a != b)
            rep.add_counterexample("f=" + cs.mor_encoding(f), "equal membership",
                                   "windows disagree");
          if (a == Membership::Overflow) rep.skipped_cases++;
        }
      }
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  {
    CheckReport rep;
    rep.name = "subsystem/determination-ob";
    if (w1.L != w2.L || w1.bt_ids != w2.bt_ids) {
      rep.skipped_cases++;
    } else {
      // B~ determines B above length 0, as far as delta stays in the window:
      // X is recovered as ft(target(delta(X))).
      std::uint32_t top = w1.L;  // delta(X) needs l(X) + 1 <= L
      auto in_range = [&](ObHandle x) { return x.length >= 1 && x.length + 1 <= top; };
      for (ObHandle x : w1.B) {
        if (!in_range(x)) continue;
        rep.cases++;
        if (!w2.contains(x))
          rep.add_counterexample("X=" + cs.ob_encoding(x), "in both B sets",
                                 "only in the first");
      }
      for (ObHandle x : w2.B) {
        if (!in_range(x)) continue;
        rep.cases++;
        if (!w1.contains(x))
          rep.add_counterexample("X=" + cs.ob_encoding(x), "in both B sets",
                                 "only in the second");
      }
    }
    rep.finish();
    out.push_back(std::move(rep));
  }

  return out;
}

nlohmann::json window_to_json(const CSystem& cs, const SubsystemWindow& w) {
  nlohmann::json j;
  j["L"] = w.L;
  j["B"] = nlohmann::json::array();
  for (ObHandle x : w.B) j["B"].push_back(cs.ob_encoding(x));
  j["B_tilde"] = nlohmann::json::array();
  for (const Section& s : w.B_tilde) j["B_tilde"].push_back(cs.mor_encoding(s.mor));
  j["frontier"] = w.frontier;
  j["saturated_within_window"] = w.saturated_within_window;
  return j;
}

SubsystemSeed seed_from_json(const CSystem& cs, const nlohmann::json& j) {
  SubsystemSeed seed;
  for (const auto& e : j.value("objects", nlohmann::json::array())) {
    auto x = cs.ob_from_encoding(e.get<std::string>());
    if (!x) throw domain_error("unknown object encoding: " + e.get<std::string>());
    seed.objects.push_back(*x);
  }
  for (const auto& e : j.value("sections", nlohmann::json::array())) {
    auto m = cs.mor_from_encoding(e.get<std::string>());
    if (!m || !cs.is_section(*m))
      throw domain_error("not a section encoding: " + e.get<std::string>());
    seed.sections.push_back(Section{*m});
  }
  return seed;
}

}  // namespace csys
