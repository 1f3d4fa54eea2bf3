#include "csys/congruence.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace csys {

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<std::uint32_t> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (auto id : ids_) parent_[id] = id;
}

std::uint32_t Partition::rep(std::uint32_t id) const {
  auto it = parent_.find(id);
  if (it == parent_.end()) return id;  // outside the carrier: singleton
  while (it->second != it->first) {
    auto up = parent_.find(it->second);
    it->second = up->second;  // path halving
    it = up;
  }
  return it->first;
}

bool Partition::related(std::uint32_t a, std::uint32_t b) const { return rep(a) == rep(b); }

bool Partition::merge(std::uint32_t a, std::uint32_t b) {
  std::uint32_t ra = rep(a);
  std::uint32_t rb = rep(b);
  if (ra == rb) return false;
  if (rb < ra) std::swap(ra, rb);  // keep the minimal id as representative
  parent_[rb] = ra;
  return true;
}

std::size_t Partition::class_count() const {
  std::set<std::uint32_t> reps;
  for (auto id : ids_) reps.insert(rep(id));
  return reps.size();
}

std::map<std::uint32_t, std::vector<std::uint32_t>> Partition::classes() const {
  std::map<std::uint32_t, std::vector<std::uint32_t>> out;
  for (auto id : ids_) out[rep(id)].push_back(id);
  return out;
}

bool operator==(const Partition& a, const Partition& b) {
  if (a.ids_ != b.ids_) return false;
  for (auto id : a.ids_)
    if (a.rep(id) != b.rep(id)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Carrier bookkeeping

namespace {

struct Carrier {
  std::vector<ObHandle> obs;       // core + aux
  std::vector<Section> sects;      // core + aux targets
  std::vector<MorHandle> mors;     // all enumerated core-to-core morphisms
  std::map<std::uint32_t, ObHandle> ob_by_id;
  std::map<std::uint32_t, Section> sect_by_id;
  std::map<std::uint32_t, MorHandle> mor_by_id;

  bool has_ob(std::uint32_t id) const { return ob_by_id.count(id) != 0; }
  bool has_sect(std::uint32_t id) const { return sect_by_id.count(id) != 0; }
  bool has_mor(std::uint32_t id) const { return mor_by_id.count(id) != 0; }
};

Carrier make_carrier(const Fragment& frag) {
  Carrier c;
  c.obs = frag.objects;
  c.obs.insert(c.obs.end(), frag.aux.begin(), frag.aux.end());
  c.sects = frag.all_sections();
  for (ObHandle x : c.obs) c.ob_by_id.emplace(x.id, x);
  for (const Section& s : c.sects) c.sect_by_id.emplace(s.mor.id, s);
  for (const auto& [key, hs] : frag.homs)
    for (MorHandle m : hs.mors)
      if (c.mor_by_id.emplace(m.id, m).second) c.mors.push_back(m);
  return c;
}

std::vector<std::uint32_t> ob_ids(const Carrier& c) {
  std::vector<std::uint32_t> v;
  for (ObHandle x : c.obs) v.push_back(x.id);
  return v;
}
std::vector<std::uint32_t> sect_ids(const Carrier& c) {
  std::vector<std::uint32_t> v;
  for (const Section& s : c.sects) v.push_back(s.mor.id);
  return v;
}
std::vector<std::uint32_t> mor_ids(const Carrier& c) {
  std::vector<std::uint32_t> v;
  for (MorHandle m : c.mors) v.push_back(m.id);
  return v;
}

/// whether some ft^i(x) with i >= 1 equals the given object
bool has_ancestor(const CSystem& cs, ObHandle x, ObHandle anc) {
  ObHandle cur = x;
  for (std::uint32_t i = 0; i < x.length; ++i) {
    cur = cs.ft(cur);
    if (cur == anc) return true;
  }
  return false;
}

/// All defined instances of the seven object/section operations over the
/// carrier, with their results, computed once; tuples whose result escapes
/// the carrier are only counted.
struct OpTuples {
  struct Un {
    std::uint32_t in, out;
  };
  struct Bin {
    std::uint32_t a, b, out;
  };
  std::vector<Un> ft;       // ob -> ob
  std::vector<Un> partial;  // sect -> ob
  std::vector<Un> delta;    // ob -> sect
  std::vector<Bin> T;       // (ob, ob) -> ob
  std::vector<Bin> Tt;      // (ob, sect) -> sect
  std::vector<Bin> S;       // (sect, ob) -> ob
  std::vector<Bin> St;      // (sect, sect) -> sect
  std::uint64_t escaped = 0;
};

OpTuples collect_op_tuples(const CSystem& cs, const Carrier& c, std::uint32_t L) {
  OpTuples t;
  for (ObHandle x : c.obs) {
    t.ft.push_back({x.id, cs.ft(x).id});
    if (x.length >= 1) {
      if (x.length + 1 > L + 1) {
        t.escaped++;
      } else {
        Section d = op_delta(cs, x);
        if (c.has_sect(d.mor.id))
          t.delta.push_back({x.id, d.mor.id});
        else
          t.escaped++;
      }
    }
  }
  for (const Section& s : c.sects) t.partial.push_back({s.mor.id, op_partial(s).id});

  for (ObHandle y : c.obs) {
    if (y.length == 0) continue;
    for (ObHandle x : c.obs) {
      if (!level_offset(cs, y, x)) continue;
      if (x.length + 1 > L + 1) {
        t.escaped++;
        continue;
      }
      try {
        ObHandle r = op_T(cs, y, x);
        if (c.has_ob(r.id))
          t.T.push_back({y.id, x.id, r.id});
        else
          t.escaped++;
      } catch (const domain_error&) {
      }
    }
    for (const Section& r : c.sects) {
      if (!level_offset(cs, y, r.target())) continue;
      if (r.target().length + 1 > L + 1) {
        t.escaped++;
        continue;
      }
      try {
        Section out = op_Tt(cs, y, r);
        if (c.has_sect(out.mor.id))
          t.Tt.push_back({y.id, r.mor.id, out.mor.id});
        else
          t.escaped++;
      } catch (const domain_error&) {
      }
    }
  }

  for (const Section& s : c.sects) {
    ObHandle base = op_partial(s);
    for (ObHandle x : c.obs) {
      if (!has_ancestor(cs, x, base)) continue;
      try {
        ObHandle r = op_S(cs, s, x);
        if (c.has_ob(r.id))
          t.S.push_back({s.mor.id, x.id, r.id});
        else
          t.escaped++;
      } catch (const domain_error&) {
      }
    }
    for (const Section& r : c.sects) {
      if (!has_ancestor(cs, r.target(), base)) continue;
      try {
        Section out = op_St(cs, s, r);
        if (c.has_sect(out.mor.id))
          t.St.push_back({s.mor.id, r.mor.id, out.mor.id});
        else
          t.escaped++;
      } catch (const domain_error&) {
      }
    }
  }
  return t;
}

Budget tight_pairs(const Budget& b) {
  Budget out = b;
  out.pair_cap = std::min<std::uint64_t>(out.pair_cap, 4096);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Seeds

RelationSeed relation_from_json(const CSystem& cs, const nlohmann::json& j) {
  RelationSeed seed;
  for (const auto& p : j.value("ob_pairs", nlohmann::json::array())) {
    auto a = cs.ob_from_encoding(p.at(0).get<std::string>());
    auto b = cs.ob_from_encoding(p.at(1).get<std::string>());
    if (!a || !b) throw domain_error("unknown object encoding in relation seed");
    seed.ob_pairs.emplace_back(*a, *b);
  }
  for (const auto& p : j.value("sect_pairs", nlohmann::json::array())) {
    auto a = cs.mor_from_encoding(p.at(0).get<std::string>());
    auto b = cs.mor_from_encoding(p.at(1).get<std::string>());
    if (!a || !b || !cs.is_section(*a) || !cs.is_section(*b))
      throw domain_error("relation seed entry is not a section");
    seed.sect_pairs.emplace_back(Section{*a}, Section{*b});
  }
  return seed;
}

// ---------------------------------------------------------------------------
// Closure

std::pair<ObPartition, SectPartition> cong_close(const CSystem& cs, const RelationSeed& seed,
                                                 const Fragment& frag) {
  Carrier c = make_carrier(frag);
  ObPartition ob(ob_ids(c));
  SectPartition sect(sect_ids(c));

  for (const auto& [a, b] : seed.ob_pairs) {
    if (a.length != b.length) throw domain_error("seed relates objects of different length");
    if (!c.has_ob(a.id) || !c.has_ob(b.id)) throw domain_error("seed object not in fragment");
    ob.merge(a.id, b.id);
  }
  for (const auto& [s, t] : seed.sect_pairs) {
    if (s.target().length != t.target().length)
      throw domain_error("seed relates sections of different level");
    if (!c.has_sect(s.mor.id) || !c.has_sect(t.mor.id))
      throw domain_error("seed section not in fragment");
    sect.merge(s.mor.id, t.mor.id);
  }

  OpTuples t = collect_op_tuples(cs, c, frag.budget.max_len);

  bool changed = true;
  while (changed) {
    changed = false;
    auto un = [&](const std::vector<OpTuples::Un>& tup, const Partition& in, Partition& out) {
      std::map<std::uint32_t, std::uint32_t> sig;
      for (const auto& e : tup) {
        auto [it, fresh] = sig.emplace(in.rep(e.in), e.out);
        if (!fresh) changed |= out.merge(it->second, e.out);
      }
    };
    auto bin = [&](const std::vector<OpTuples::Bin>& tup, const Partition& ina,
                   const Partition& inb, Partition& out) {
      std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> sig;
      for (const auto& e : tup) {
        auto [it, fresh] = sig.emplace(std::make_pair(ina.rep(e.a), inb.rep(e.b)), e.out);
        if (!fresh) changed |= out.merge(it->second, e.out);
      }
    };
    un(t.ft, ob, ob);
    un(t.partial, sect, ob);
    un(t.delta, ob, sect);
    bin(t.T, ob, ob, ob);
    bin(t.Tt, ob, sect, sect);
    bin(t.S, sect, ob, ob);
    bin(t.St, sect, sect, sect);
  }
  return {std::move(ob), std::move(sect)};
}

// ---------------------------------------------------------------------------
// Proposition conditions

CheckReport check_prop_conditions(const CSystem& cs, const ObPartition& ob,
                                  const SectPartition& sect, const Fragment& frag) {
  Carrier c = make_carrier(frag);
  OpTuples t = collect_op_tuples(cs, c, frag.budget.max_len);

  CheckReport rep;
  rep.name = "congruence/prop-conditions";
  rep.skipped_cases += t.escaped;

  auto name_ob = [&](std::uint32_t id) { return cs.ob_encoding(c.ob_by_id.at(id)); };
  auto name_sect = [&](std::uint32_t id) { return cs.mor_encoding(c.sect_by_id.at(id).mor); };

  // condition 1: compatibility of the seven operations
  auto un = [&](const char* op, const std::vector<OpTuples::Un>& tup, const Partition& in,
                const Partition& out, auto&& in_name, auto&& out_name) {
    std::map<std::uint32_t, std::uint32_t> sig;
    for (const auto& e : tup) {
      rep.cases++;
      auto [it, fresh] = sig.emplace(in.rep(e.in), e.out);
      if (!fresh && !out.related(it->second, e.out))
        rep.add_counterexample(std::string("condition 1, ") + op + "(" + in_name(e.in) + ")",
                               out_name(it->second), out_name(e.out));
    }
  };
  auto bin = [&](const char* op, const std::vector<OpTuples::Bin>& tup, const Partition& ina,
                 const Partition& inb, const Partition& out, auto&& a_name, auto&& b_name,
                 auto&& out_name) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> sig;
    for (const auto& e : tup) {
      rep.cases++;
      auto [it, fresh] = sig.emplace(std::make_pair(ina.rep(e.a), inb.rep(e.b)), e.out);
      if (!fresh && !out.related(it->second, e.out))
        rep.add_counterexample(
            std::string("condition 1, ") + op + "(" + a_name(e.a) + ", " + b_name(e.b) + ")",
            out_name(it->second), out_name(e.out));
    }
  };
  un("ft", t.ft, ob, ob, name_ob, name_ob);
  un("partial", t.partial, sect, ob, name_sect, name_ob);
  un("delta", t.delta, ob, sect, name_ob, name_sect);
  bin("T", t.T, ob, ob, ob, name_ob, name_ob, name_ob);
  bin("Tt", t.Tt, ob, sect, sect, name_ob, name_sect, name_sect);
  bin("S", t.S, sect, ob, ob, name_sect, name_ob, name_ob);
  bin("St", t.St, sect, sect, sect, name_sect, name_sect, name_sect);

  // condition 2: length preservation
  auto ob_classes = ob.classes();
  for (const auto& [r, members] : ob_classes) {
    for (auto id : members) {
      rep.cases++;
      if (c.ob_by_id.at(id).length != c.ob_by_id.at(r).length)
        rep.add_counterexample("condition 2, " + name_ob(r) + " ~ " + name_ob(id),
                               "equal length", "lengths differ");
    }
  }
  auto sect_classes = sect.classes();
  for (const auto& [r, members] : sect_classes) {
    for (auto id : members) {
      rep.cases++;
      if (c.sect_by_id.at(id).target().length != c.sect_by_id.at(r).target().length)
        rep.add_counterexample("condition 2, " + name_sect(r) + " ~= " + name_sect(id),
                               "equal level", "levels differ");
    }
  }

  // condition 3: for ft(X) ~ F there is X_F ~ X with ft(X_F) = F
  for (ObHandle x : c.obs) {
    if (x.length == 0) continue;
    const auto& cls = ob_classes.at(ob.rep(x.id));
    for (ObHandle f : c.obs) {
      if (!ob.related(cs.ft(x).id, f.id)) continue;
      rep.cases++;
      bool found = false;
      for (auto id : cls)
        if (cs.ft(c.ob_by_id.at(id)) == f) {
          found = true;
          break;
        }
      if (!found)
        rep.add_counterexample("condition 3, X=" + cs.ob_encoding(x) + ", F=" + cs.ob_encoding(f),
                               "some X_F ~ X with ft(X_F) = F", "no witness in the fragment");
    }
  }

  // condition 4: for target(s) ~ X' there is s' ~= s with target(s') = X'
  for (const Section& s : c.sects) {
    const auto& cls = sect_classes.at(sect.rep(s.mor.id));
    for (ObHandle x2 : c.obs) {
      if (!ob.related(s.target().id, x2.id)) continue;
      rep.cases++;
      bool found = false;
      for (auto id : cls)
        if (c.sect_by_id.at(id).target() == x2) {
          found = true;
          break;
        }
      if (!found)
        rep.add_counterexample(
            "condition 4, s=" + cs.mor_encoding(s.mor) + ", X'=" + cs.ob_encoding(x2),
            "some s' ~= s with target X'", "no witness in the fragment");
    }
  }

  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Morphism extension

namespace {

/// Chain signature of a morphism: the source class, then per target level
/// the target class and the class of the canonical section. Two morphisms
/// are related by the inductive extension iff their signatures coincide.
std::vector<std::uint32_t> mor_signature(const CSystem& cs, const ObPartition& ob,
                                         const SectPartition& sect, MorHandle f) {
  std::vector<std::uint32_t> key{ob.rep(f.src.id)};
  MorHandle cur = f;
  while (cur.tgt.length > 0) {
    key.push_back(ob.rep(cur.tgt.id));
    key.push_back(sect.rep(cs.section_of(cur).mor.id));
    cur = ft_mor(cs, cur);
  }
  return key;
}

}  // namespace

MorPartition extend_to_mor(const CSystem& cs, const ObPartition& ob, const SectPartition& sect,
                           const Fragment& frag) {
  Carrier c = make_carrier(frag);
  MorPartition mor(mor_ids(c));
  std::map<std::vector<std::uint32_t>, std::uint32_t> buckets;
  for (MorHandle f : c.mors) {
    auto [it, fresh] = buckets.emplace(mor_signature(cs, ob, sect, f), f.id);
    if (!fresh) mor.merge(it->second, f.id);
  }
  return mor;
}

// ---------------------------------------------------------------------------
// Congruence definition conditions

CheckReport check_congruence_def(const CSystem& cs, const ObPartition& ob,
                                 const MorPartition& mor, const Fragment& frag) {
  Carrier c = make_carrier(frag);
  Budget pb = tight_pairs(frag.budget);

  CheckReport rep;
  rep.name = "congruence/def-conditions";

  auto name_ob = [&](std::uint32_t id) { return cs.ob_encoding(c.ob_by_id.at(id)); };
  auto name_mor = [&](std::uint32_t id) { return cs.mor_encoding(c.mor_by_id.at(id)); };

  auto mor_classes = mor.classes();
  auto ob_classes = ob.classes();

  // condition 1 + 2 on morphism classes: sources, targets, lengths
  for (const auto& [r, members] : mor_classes) {
    MorHandle f0 = c.mor_by_id.at(r);
    for (auto id : members) {
      MorHandle f = c.mor_by_id.at(id);
      rep.cases += 2;
      if (!ob.related(f.src.id, f0.src.id) || f.src.length != f0.src.length)
        rep.add_counterexample("condition 1, source of " + name_mor(r) + " ~ " + name_mor(id),
                               "related sources of equal length", "unrelated");
      if (!ob.related(f.tgt.id, f0.tgt.id) || f.tgt.length != f0.tgt.length)
        rep.add_counterexample("condition 1, target of " + name_mor(r) + " ~ " + name_mor(id),
                               "related targets of equal length", "unrelated");
    }
  }
  for (const auto& [r, members] : ob_classes) {
    ObHandle x0 = c.ob_by_id.at(r);
    for (auto id : members) {
      ObHandle x = c.ob_by_id.at(id);
      rep.cases += 3;
      if (x.length != x0.length)
        rep.add_counterexample("condition 2, " + name_ob(r) + " ~ " + name_ob(id),
                               "equal length", "lengths differ");
      if (!ob.related(cs.ft(x).id, cs.ft(x0).id))
        rep.add_counterexample("condition 1, ft of " + name_ob(r) + " ~ " + name_ob(id),
                               "related", "unrelated");
      // identities and canonical projections of related objects
      MorHandle i0 = cs.identity(x0);
      MorHandle ix = cs.identity(x);
      if (c.has_mor(i0.id) && c.has_mor(ix.id)) {
        if (!mor.related(i0.id, ix.id))
          rep.add_counterexample("condition 1, Id of " + name_ob(r) + " ~ " + name_ob(id),
                                 "related", "unrelated");
      } else {
        rep.skipped_cases++;
      }
      MorHandle p0 = cs.proj(x0);
      MorHandle px = cs.proj(x);
      rep.cases++;
      if (c.has_mor(p0.id) && c.has_mor(px.id)) {
        if (!mor.related(p0.id, px.id))
          rep.add_counterexample("condition 1, p of " + name_ob(r) + " ~ " + name_ob(id),
                                 "related", "unrelated");
      } else {
        rep.skipped_cases++;
      }
    }
  }

  // condition 1, composition: related composable tuples give related results
  {
    std::map<std::uint32_t, std::vector<MorHandle>> by_src, by_tgt;
    for (MorHandle f : c.mors) {
      by_src[f.src.id].push_back(f);
      by_tgt[f.tgt.id].push_back(f);
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> sig;
    for (const auto& [mid, gs] : by_src) {
      auto it = by_tgt.find(mid);
      if (it == by_tgt.end()) continue;
      const auto& fs = it->second;
      bool sampled = detail::for_pairs(
          fs.size(), gs.size(), pb, 0x11u ^ mid, [&](std::uint64_t i, std::uint64_t j) {
            MorHandle fg = cs.compose(fs[i], gs[j]);
            if (!c.has_mor(fg.id)) {
              rep.skipped_cases++;
              return;
            }
            rep.cases++;
            auto [sit, fresh] =
                sig.emplace(std::make_pair(mor.rep(fs[i].id), mor.rep(gs[j].id)), fg.id);
            if (!fresh && !mor.related(sit->second, fg.id))
              rep.add_counterexample("condition 1, composition of " +
                                         cs.mor_encoding(fs[i]) + " and " +
                                         cs.mor_encoding(gs[j]),
                                     name_mor(sit->second), name_mor(fg.id));
          });
      if (sampled) rep.skipped_cases++;
    }
  }

  // condition 1, star / q / s_f
  {
    std::map<std::uint32_t, std::vector<MorHandle>> by_tgt;
    for (MorHandle f : c.mors) by_tgt[f.tgt.id].push_back(f);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> sig_star, sig_q;
    for (ObHandle x : c.obs) {
      if (x.length == 0) continue;
      auto it = by_tgt.find(cs.ft(x).id);
      if (it == by_tgt.end()) continue;
      for (MorHandle f : it->second) {
        ObHandle st = cs.star(f, x);
        auto key = std::make_pair(mor.rep(f.id), ob.rep(x.id));
        if (c.has_ob(st.id)) {
          rep.cases++;
          auto [sit, fresh] = sig_star.emplace(key, st.id);
          if (!fresh && !ob.related(sit->second, st.id))
            rep.add_counterexample("condition 1, star(" + cs.mor_encoding(f) + ", " +
                                       cs.ob_encoding(x) + ")",
                                   name_ob(sit->second), name_ob(st.id));
        } else {
          rep.skipped_cases++;
        }
        MorHandle q = cs.q_map(f, x);
        if (c.has_mor(q.id)) {
          rep.cases++;
          auto [qit, fresh] = sig_q.emplace(key, q.id);
          if (!fresh && !mor.related(qit->second, q.id))
            rep.add_counterexample("condition 1, q(" + cs.mor_encoding(f) + ", " +
                                       cs.ob_encoding(x) + ")",
                                   name_mor(qit->second), name_mor(q.id));
        } else {
          rep.skipped_cases++;
        }
      }
    }
    std::map<std::uint32_t, std::uint32_t> sig_sf;
    for (MorHandle f : c.mors) {
      if (f.tgt.length == 0) continue;
      Section sf = cs.section_of(f);
      if (!c.has_mor(sf.mor.id)) {
        rep.skipped_cases++;
        continue;
      }
      rep.cases++;
      auto [it, fresh] = sig_sf.emplace(mor.rep(f.id), sf.mor.id);
      if (!fresh && !mor.related(it->second, sf.mor.id))
        rep.add_counterexample("condition 1, s of " + cs.mor_encoding(f), name_mor(it->second),
                               name_mor(sf.mor.id));
    }
  }

  // condition 3: object lifting along related fathers
  for (ObHandle x : c.obs) {
    if (x.length == 0) continue;
    const auto& cls = ob_classes.at(ob.rep(x.id));
    for (ObHandle f : c.obs) {
      if (!ob.related(cs.ft(x).id, f.id)) continue;
      rep.cases++;
      bool found = false;
      for (auto id : cls)
        if (cs.ft(c.ob_by_id.at(id)) == f) {
          found = true;
          break;
        }
      if (!found)
        rep.add_counterexample("condition 3, X=" + cs.ob_encoding(x) + ", F=" + cs.ob_encoding(f),
                               "some X_F ~ X with ft(X_F) = F", "no witness in the fragment");
    }
  }

  // condition 4: morphism lifting along related endpoints
  {
    bool sampled = detail::for_pairs(
        c.mors.size(), 1, pb, 0x12u, [&](std::uint64_t i, std::uint64_t) {
          MorHandle f = c.mors[i];
          const auto& cls = mor_classes.at(mor.rep(f.id));
          for (auto sid : ob_classes.at(ob.rep(f.src.id))) {
            for (auto tid : ob_classes.at(ob.rep(f.tgt.id))) {
              rep.cases++;
              bool found = false;
              for (auto mid : cls) {
                MorHandle g = c.mor_by_id.at(mid);
                if (g.src.id == sid && g.tgt.id == tid) {
                  found = true;
                  break;
                }
              }
              if (!found)
                rep.add_counterexample("condition 4, f=" + cs.mor_encoding(f) +
                                           ", X'=" + name_ob(sid) + ", Y'=" + name_ob(tid),
                                       "some f' ~ f from X' to Y'", "no witness");
            }
          }
        });
    if (sampled) rep.skipped_cases++;
  }

  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Projection-section identity

bool proj_section_identity(const CSystem& cs, ObHandle x, std::uint32_t i) {
  if (i < 1 || i >= x.length) throw domain_error("proj_section_identity: need 1 <= i < l(X)");
  Section lhs = cs.section_of(proj_iter(cs, x, i));
  Section rhs = op_delta(cs, ft_iter(cs, x, i));
  for (std::uint32_t k = i; k-- > 0;) rhs = op_Tt(cs, ft_iter(cs, x, k), rhs);
  return lhs == rhs;
}

// ---------------------------------------------------------------------------
// Quotient

namespace {

class QuotientCS final : public CSystem {
 public:
  QuotientCS(CSystemPtr base, const Fragment& frag, ObPartition ob, SectPartition sect)
      : base_(std::move(base)), L_(frag.budget.max_len), ob_(std::move(ob)),
        sect_(std::move(sect)), carrier_(make_carrier(frag)) {
    for (const auto& [r, members] : ob_.classes()) {
      std::uint32_t qid = static_cast<std::uint32_t>(classes_.size());
      ObHandle canon = carrier_.ob_by_id.at(r);
      classes_.push_back({canon, members});
      for (auto id : members) ob_class_of_[id] = qid;
    }
    for (const auto& [r, members] : sect_.classes()) sect_members_[r] = members;
  }

  std::string kind() const override { return "quotient"; }
  nlohmann::json config_json() const override {
    return nlohmann::json{{"kind", "quotient"}, {"base", base_->config_json()}};
  }

  ObHandle ft(ObHandle x) const override { return project_ob(base_->ft(canon(x))); }

  std::vector<ObHandle> enum_objects(std::uint32_t max_len, const Budget&,
                                     bool* truncated) const override {
    if (truncated) *truncated = false;
    std::vector<std::pair<std::string, ObHandle>> tmp;
    for (std::uint32_t qid = 0; qid < classes_.size(); ++qid) {
      ObHandle canon = classes_[qid].canon;
      if (canon.length <= max_len)
        tmp.emplace_back(base_->ob_encoding(canon), qob(qid));
    }
    std::sort(tmp.begin(), tmp.end(), [](const auto& a, const auto& b) {
      if (a.second.length != b.second.length) return a.second.length < b.second.length;
      return a.first < b.first;
    });
    std::vector<ObHandle> out;
    for (auto& [enc, h] : tmp) out.push_back(h);
    return out;
  }

  std::string ob_encoding(ObHandle x) const override { return base_->ob_encoding(canon(x)); }
  std::string mor_encoding(MorHandle m) const override {
    return base_->mor_encoding(rep_of(m));
  }
  std::optional<ObHandle> ob_from_encoding(const std::string& enc) const override {
    auto b = base_->ob_from_encoding(enc);
    if (!b) return std::nullopt;
    auto it = ob_class_of_.find(b->id);
    if (it == ob_class_of_.end()) return std::nullopt;
    return qob(it->second);
  }
  std::optional<MorHandle> mor_from_encoding(const std::string& enc) const override {
    auto b = base_->mor_from_encoding(enc);
    if (!b) return std::nullopt;
    try {
      return project_mor(*b);
    } catch (const window_error&) {
      return std::nullopt;
    }
  }

  bool has_points() const override { return base_->has_points(); }
  std::uint64_t point_count(ObHandle x) const override { return base_->point_count(canon(x)); }

  /// class of a base object; window_error outside the carrier
  ObHandle project_ob(ObHandle base_x) const {
    auto it = ob_class_of_.find(base_x.id);
    if (it == ob_class_of_.end())
      throw window_error("quotient: object outside the fragment window");
    return qob(it->second);
  }

  /// class of a base morphism, interned by chain signature
  MorHandle project_mor(MorHandle f) const {
    if (f.src.length > L_)
      throw window_error("quotient: morphism source beyond the fragment window");
    ObHandle qs = project_ob(f.src);
    ObHandle qt = project_ob(f.tgt);
    auto key = mor_signature(*base_, ob_, sect_, f);
    auto it = mor_intern_.find(key);
    if (it != mor_intern_.end()) return mors_[it->second].handle;
    MorHandle realized = realize(f, classes_[qs.id].canon, classes_[qt.id].canon);
    std::uint32_t qid = static_cast<std::uint32_t>(mors_.size());
    MorHandle h{qid, qs, qt};
    mors_.push_back({h, realized});
    mor_intern_.emplace(std::move(key), qid);
    return h;
  }

 protected:
  ObHandle do_pt() const override { return project_ob(base_->pt()); }
  MorHandle do_proj(ObHandle x) const override { return project_mor(base_->proj(canon(x))); }

  ObHandle do_star(MorHandle f, ObHandle x) const override {
    MorHandle fr = rep_of(f);
    ObHandle xr = member_over(x, fr.tgt);
    return project_ob(base_->star(fr, xr));
  }
  MorHandle do_q(MorHandle f, ObHandle x) const override {
    MorHandle fr = rep_of(f);
    ObHandle xr = member_over(x, fr.tgt);
    return project_mor(base_->q_map(fr, xr));
  }
  MorHandle do_comp(MorHandle f, MorHandle g) const override {
    // representatives have canonical endpoints, so they compose on the nose
    return project_mor(base_->compose(rep_of(f), rep_of(g)));
  }
  MorHandle do_identity(ObHandle x) const override {
    return project_mor(base_->identity(canon(x)));
  }
  MorHandle do_sf(MorHandle f) const override {
    return project_mor(base_->section_of(rep_of(f)).mor);
  }

  HomSet do_enum_hom(ObHandle y, ObHandle x, const Budget& b) const override {
    HomSet base_hs = base_->enum_hom(canon(y), canon(x), b);
    HomSet out;
    out.truncated = base_hs.truncated;
    std::set<std::uint32_t> seen;
    for (MorHandle m : base_hs.mors) {
      MorHandle q = project_mor(m);
      if (seen.insert(q.id).second) out.mors.push_back(q);
    }
    return out;
  }

  std::vector<MorHandle> do_enum_sections(ObHandle x, const Budget& b,
                                          bool* truncated) const override {
    std::vector<Section> base_secs = base_->enum_sections(canon(x), b, truncated);
    std::vector<MorHandle> out;
    std::set<std::uint32_t> seen;
    for (const Section& s : base_secs) {
      MorHandle q = project_mor(s.mor);
      if (seen.insert(q.id).second) out.push_back(q);
    }
    return out;
  }

 private:
  struct ObClass {
    ObHandle canon;  // minimal base id in the class
    std::vector<std::uint32_t> members;
  };
  struct QMor {
    MorHandle handle;
    MorHandle rep;  // base morphism with canonical endpoints
  };

  ObHandle qob(std::uint32_t qid) const { return ObHandle{qid, classes_[qid].canon.length}; }
  ObHandle canon(ObHandle x) const {
    if (x.id >= classes_.size()) throw window_error("quotient: unknown object handle");
    return classes_[x.id].canon;
  }
  MorHandle rep_of(MorHandle m) const {
    if (m.id >= mors_.size()) throw window_error("quotient: unknown morphism handle");
    return mors_[m.id].rep;
  }

  /// member of the class of x whose ft is exactly the given base object
  ObHandle member_over(ObHandle x, ObHandle base_ft) const {
    if (x.id >= classes_.size()) throw window_error("quotient: unknown object handle");
    for (auto id : classes_[x.id].members) {
      ObHandle cand = carrier_.ob_by_id.at(id);
      if (base_->ft(cand) == base_ft) return cand;
    }
    throw window_error("quotient: no class member over the required base");
  }

  /// the class member of f with the prescribed endpoints, rebuilt level by
  /// level from its section chain
  MorHandle realize(MorHandle f, ObHandle src, ObHandle tgt) const {
    if (tgt.length == 0) return proj_iter(*base_, src, src.length);
    MorHandle g = realize(ft_mor(*base_, f), src, base_->ft(tgt));
    ObHandle st = base_->star(g, tgt);
    Section sf = base_->section_of(f);
    std::uint32_t srep = sect_.rep(sf.mor.id);
    auto it = sect_members_.find(srep);
    if (it != sect_members_.end()) {
      for (auto id : it->second) {
        const Section& cand = carrier_.sect_by_id.at(id);
        if (cand.target() == st) return base_->compose(cand.mor, base_->q_map(g, tgt));
      }
    } else if (sf.target() == st) {
      // singleton class outside the carrier: s_f itself is the only witness
      return base_->compose(sf.mor, base_->q_map(g, tgt));
    }
    throw window_error("quotient: no section witness for realization");
  }

  CSystemPtr base_;
  std::uint32_t L_;
  ObPartition ob_;
  SectPartition sect_;
  Carrier carrier_;
  std::vector<ObClass> classes_;
  std::map<std::uint32_t, std::uint32_t> ob_class_of_;
  std::map<std::uint32_t, std::vector<std::uint32_t>> sect_members_;
  mutable std::vector<QMor> mors_;
  mutable std::map<std::vector<std::uint32_t>, std::uint32_t> mor_intern_;
};

}  // namespace

QuotientResult build_quotient(const CSystem& cs, const RegularCongruenceWindow& rel,
                              const Fragment& frag) {
  auto q = std::make_shared<QuotientCS>(frag.cs, frag, rel.ob, rel.sect);
  Carrier c = make_carrier(frag);
  Budget pb = tight_pairs(frag.budget);

  CheckReport rep;
  rep.name = "quotient/well-defined";

  // the projection must be constant on classes and commute with every
  // operation, which is exactly representative independence
  auto pmor = [&](MorHandle f) -> std::optional<MorHandle> {
    try {
      return q->project_mor(f);
    } catch (const window_error&) {
      return std::nullopt;
    }
  };

  for (const auto& [r, members] : rel.ob.classes()) {
    ObHandle x0 = c.ob_by_id.at(r);
    for (auto id : members) {
      ObHandle x = c.ob_by_id.at(id);
      rep.cases++;
      if (q->project_ob(cs.ft(x)) != q->project_ob(cs.ft(x0)))
        rep.add_counterexample("ft on class of " + cs.ob_encoding(x0), "class independent",
                               "depends on " + cs.ob_encoding(x));
    }
  }
  if (rel.mor_populated) {
    for (const auto& [r, members] : rel.mor.classes()) {
      if (!c.has_mor(r)) continue;
      auto q0 = pmor(c.mor_by_id.at(r));
      for (auto id : members) {
        rep.cases++;
        auto qi = pmor(c.mor_by_id.at(id));
        if (!q0 || !qi) {
          rep.skipped_cases++;
          continue;
        }
        if (*q0 != *qi)
          rep.add_counterexample("projection on class of " + cs.mor_encoding(c.mor_by_id.at(r)),
                                 "class independent",
                                 "splits at " + cs.mor_encoding(c.mor_by_id.at(id)));
      }
    }
  }

  // homomorphism spot checks: p, s_f, composition, star, q
  for (ObHandle x : c.obs) {
    if (x.length > frag.budget.max_len) continue;  // projections of core objects
    rep.cases++;
    auto lhs = pmor(cs.proj(x));
    if (!lhs) {
      rep.skipped_cases++;
      continue;
    }
    if (*lhs != q->proj(q->project_ob(x)))
      rep.add_counterexample("p at " + cs.ob_encoding(x), "projection commutes", "differs");
  }
  {
    bool sampled = detail::for_pairs(
        c.mors.size(), 1, pb, 0x21u, [&](std::uint64_t i, std::uint64_t) {
          MorHandle f = c.mors[i];
          if (f.tgt.length == 0) return;
          rep.cases++;
          auto qf = pmor(f);
          auto qsf = pmor(cs.section_of(f).mor);
          if (!qf || !qsf) {
            rep.skipped_cases++;
            return;
          }
          if (q->section_of(*qf).mor != *qsf)
            rep.add_counterexample("s_f at " + cs.mor_encoding(f), "s commutes", "differs");
        });
    if (sampled) rep.skipped_cases++;
  }
  {
    std::map<std::uint32_t, std::vector<MorHandle>> by_src, by_tgt;
    for (MorHandle f : c.mors) {
      by_src[f.src.id].push_back(f);
      by_tgt[f.tgt.id].push_back(f);
    }
    for (const auto& [mid, gs] : by_src) {
      auto it = by_tgt.find(mid);
      if (it == by_tgt.end()) continue;
      const auto& fs = it->second;
      bool sampled = detail::for_pairs(
          fs.size(), gs.size(), pb, 0x22u ^ mid, [&](std::uint64_t i, std::uint64_t j) {
            rep.cases++;
            auto qf = pmor(fs[i]);
            auto qg = pmor(gs[j]);
            auto qfg = pmor(cs.compose(fs[i], gs[j]));
            if (!qf || !qg || !qfg) {
              rep.skipped_cases++;
              return;
            }
            if (q->compose(*qf, *qg) != *qfg)
              rep.add_counterexample("composition of " + cs.mor_encoding(fs[i]) + " and " +
                                         cs.mor_encoding(gs[j]),
                                     "composition commutes", "differs");
          });
      if (sampled) rep.skipped_cases++;
    }
    for (ObHandle x : c.obs) {
      if (x.length == 0) continue;
      auto it = by_tgt.find(cs.ft(x).id);
      if (it == by_tgt.end()) continue;
      bool sampled = detail::for_pairs(
          it->second.size(), 1, pb, 0x23u ^ x.id, [&](std::uint64_t i, std::uint64_t) {
            MorHandle f = it->second[i];
            rep.cases++;
            auto qf = pmor(f);
            if (!qf) {
              rep.skipped_cases++;
              return;
            }
            ObHandle st = cs.star(f, x);
            ObHandle qx = q->project_ob(x);
            try {
              if (q->star(*qf, qx) != q->project_ob(st)) {
                rep.add_counterexample("star(" + cs.mor_encoding(f) + ", " + cs.ob_encoding(x) +
                                           ")",
                                       "star commutes", "differs");
                return;
              }
              auto qq = pmor(cs.q_map(f, x));
              if (!qq) {
                rep.skipped_cases++;
                return;
              }
              if (q->q_map(*qf, qx) != *qq)
                rep.add_counterexample("q(" + cs.mor_encoding(f) + ", " + cs.ob_encoding(x) + ")",
                                       "q commutes", "differs");
            } catch (const window_error&) {
              rep.skipped_cases++;
            }
          });
      if (sampled) rep.skipped_cases++;
    }
  }

  rep.finish();
  return {std::move(q), std::move(rep)};
}

CheckReport check_tilde_ob_quotient(const CSystem& cs, const RegularCongruenceWindow& rel,
                                    const Fragment& frag) {
  QuotientResult built = build_quotient(cs, rel, frag);
  const auto* q = static_cast<const QuotientCS*>(built.cs.get());
  Carrier c = make_carrier(frag);

  CheckReport rep;
  rep.name = "quotient/sections-are-classes";
  if (built.well_defined.status == CheckStatus::Fail) {
    rep.add_counterexample("quotient construction", "well defined",
                           "representative dependence");
    rep.finish();
    return rep;
  }

  // sections-per-target counts of the section partition
  std::map<std::uint32_t, std::set<std::uint32_t>> classes_by_target;  // ob class -> sect reps
  for (const Section& s : c.sects)
    classes_by_target[q->project_ob(s.target()).id].insert(rel.sect.rep(s.mor.id));

  bool truncated = false;
  for (ObHandle qx : q->enum_objects(frag.budget.max_len + 1, frag.budget, &truncated)) {
    if (qx.length == 0) continue;
    rep.cases++;
    bool sec_trunc = false;
    std::vector<Section> qsecs = q->enum_sections(qx, frag.budget, &sec_trunc);
    if (sec_trunc) rep.skipped_cases++;
    std::size_t expected = classes_by_target[qx.id].size();
    if (qsecs.size() != expected) {
      rep.add_counterexample("sections of " + q->ob_encoding(qx),
                             std::to_string(expected) + " classes",
                             std::to_string(qsecs.size()) + " sections");
      continue;
    }
    if (qx.length > frag.budget.max_len) continue;  // hom path needs core endpoints
    // independent path: sections among the quotient hom set
    HomSet hom = q->enum_hom(q->ft(qx), qx, frag.budget);
    if (hom.truncated) {
      rep.skipped_cases++;
      continue;
    }
    std::set<std::uint32_t> from_hom;
    for (MorHandle m : hom.mors)
      if (q->is_section(m)) from_hom.insert(m.id);
    std::set<std::uint32_t> from_secs;
    for (const Section& s : qsecs) from_secs.insert(s.mor.id);
    rep.cases++;
    if (from_hom != from_secs)
      rep.add_counterexample("sections of " + q->ob_encoding(qx),
                             "hom filter agrees with section table", "paths disagree");
  }

  rep.finish();
  return rep;
}

CheckReport roundtrip_injectivity(const CSystem& cs, const RegularCongruenceWindow& rel,
                                  const Fragment& frag) {
  Carrier c = make_carrier(frag);
  Budget pb = tight_pairs(frag.budget);

  CheckReport rep;
  rep.name = "congruence/roundtrip";

  MorPartition extended =
      rel.mor_populated ? rel.mor : extend_to_mor(cs, rel.ob, rel.sect, frag);

  // restriction: on sections lying in the morphism carrier, the extended
  // relation coincides with the section relation
  bool sampled = detail::for_pairs(
      c.sects.size(), c.sects.size(), pb, 0x31u, [&](std::uint64_t i, std::uint64_t j) {
        const Section& s = c.sects[i];
        const Section& t = c.sects[j];
        if (!c.has_mor(s.mor.id) || !c.has_mor(t.mor.id)) {
          rep.skipped_cases++;
          return;
        }
        rep.cases++;
        if (extended.related(s.mor.id, t.mor.id) != rel.sect.related(s.mor.id, t.mor.id))
          rep.add_counterexample(
              "restriction at " + cs.mor_encoding(s.mor) + ", " + cs.mor_encoding(t.mor),
              "section relation equals restricted morphism relation", "relations disagree");
      });
  if (sampled) rep.skipped_cases++;

  // re-extension: extending (ob, sect) reproduces the morphism relation
  rep.cases++;
  if (!(extend_to_mor(cs, rel.ob, rel.sect, frag) == extended))
    rep.add_counterexample("re-extension", "identical morphism partition", "partitions differ");

  rep.finish();
  return rep;
}

}  // namespace csys
