#include "csys/kernel.hpp"

#include <map>
#include <string>

namespace csys {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string ob_str(const CSystem& cs, ObHandle x) { return cs.ob_encoding(x); }
std::string mor_str(const CSystem& cs, MorHandle m) { return cs.mor_encoding(m); }

// A corrupted instance can hand back ill-typed operation results (wrong
// endpoints), making a later operation inside a sweep throw. The checker
// must stay total: record the ill-typed result as a violation of the check
// being swept instead of propagating the exception.
template <typename Body>
void guarded_sweep(CheckReport& r, Body&& body) {
  try {
    body();
  } catch (const domain_error& e) {
    r.add_counterexample("(sweep aborted)", "well-typed operation results", e.what());
  }
}

}  // namespace

namespace detail {

bool for_pairs(std::uint64_t n, std::uint64_t m, const Budget& budget, std::uint64_t seed_tag,
               const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  if (n == 0 || m == 0) return false;
  if (n <= budget.pair_cap / m || n * m <= budget.pair_cap) {
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < m; ++j) fn(i, j);
    return false;
  }
  std::uint64_t state = budget.rng_seed ^ (seed_tag * 0x9e3779b97f4a7c15ull) ^ (n << 32) ^ m;
  for (std::uint64_t k = 0; k < budget.pair_cap; ++k) {
    std::uint64_t i = splitmix64(state) % n;
    std::uint64_t j = splitmix64(state) % m;
    fn(i, j);
  }
  return true;
}

}  // namespace detail

MorHandle ft_mor(const CSystem& cs, MorHandle f) {
  if (f.tgt.length == 0) throw domain_error("ft_mor: l(target(f)) must be positive");
  return cs.compose(f, cs.proj(f.tgt));
}

ObHandle ft_iter(const CSystem& cs, ObHandle x, std::uint32_t i) {
  ObHandle cur = x;
  for (std::uint32_t k = 0; k < i; ++k) cur = cs.ft(cur);
  return cur;
}

MorHandle proj_iter(const CSystem& cs, ObHandle x, std::uint32_t i) {
  if (x.length < i) throw domain_error("proj_iter: requires l(X) >= i");
  MorHandle cur = cs.identity(x);
  for (std::uint32_t k = 0; k < i; ++k) cur = cs.compose(cur, cs.proj(cur.tgt));
  return cur;
}

ObHandle star_iter(const CSystem& cs, MorHandle f, ObHandle x, std::uint32_t i) {
  if (x.length < i) throw domain_error("star_iter: requires l(X) >= i");
  if (f.tgt != ft_iter(cs, x, i)) throw domain_error("star_iter: target(f) must be ft^i(X)");
  if (i == 0) return f.src;
  return cs.star(q_iter(cs, f, cs.ft(x), i - 1), x);
}

MorHandle q_iter(const CSystem& cs, MorHandle f, ObHandle x, std::uint32_t i) {
  if (x.length < i) throw domain_error("q_iter: requires l(X) >= i");
  if (f.tgt != ft_iter(cs, x, i)) throw domain_error("q_iter: target(f) must be ft^i(X)");
  if (i == 0) return f;
  return cs.q_map(q_iter(cs, f, cs.ft(x), i - 1), x);
}

Section sect_pull(const CSystem& cs, MorHandle f, const Section& s, std::uint32_t i) {
  if (i < 1) throw domain_error("sect_pull: requires i >= 1");
  ObHandle x = s.target();
  if (x.length < i) throw domain_error("sect_pull: requires l(X) >= i");
  MorHandle g1 = q_iter(cs, f, cs.ft(x), i - 1);
  return cs.section_of(cs.compose(g1, s.mor));
}

std::optional<std::uint32_t> level_offset(const CSystem& cs, ObHandle y, ObHandle x) {
  ObHandle fty = cs.ft(y);
  if (x.length <= fty.length) return std::nullopt;
  std::uint32_t i = x.length - fty.length;
  if (i < 1 || i > x.length) return std::nullopt;
  if (ft_iter(cs, x, i) != fty) return std::nullopt;
  return i;
}

ObHandle op_pt(const CSystem& cs) { return cs.pt(); }
ObHandle op_ft(const CSystem& cs, ObHandle x) { return cs.ft(x); }
ObHandle op_partial(const Section& s) { return s.target(); }

ObHandle op_T(const CSystem& cs, ObHandle y, ObHandle x) {
  if (y.length == 0) throw domain_error("T: l(Y) must be positive");
  auto i = level_offset(cs, y, x);
  if (!i) throw domain_error("T: no i with ft(Y) = ft^i(X)");
  return star_iter(cs, cs.proj(y), x, *i);
}

Section op_Tt(const CSystem& cs, ObHandle y, const Section& r) {
  if (y.length == 0) throw domain_error("T~: l(Y) must be positive");
  auto i = level_offset(cs, y, r.target());
  if (!i) throw domain_error("T~: no i with ft(Y) = ft^i(X)");
  return sect_pull(cs, cs.proj(y), r, *i);
}

namespace {

// The unique i >= 1 with partial(s) = ft^i(X), when it exists.
std::optional<std::uint32_t> subst_offset(const CSystem& cs, const Section& s, ObHandle x) {
  ObHandle y = s.target();
  if (x.length <= y.length) return std::nullopt;
  std::uint32_t i = x.length - y.length;
  if (ft_iter(cs, x, i) != y) return std::nullopt;
  return i;
}

}  // namespace

ObHandle op_S(const CSystem& cs, const Section& s, ObHandle x) {
  auto i = subst_offset(cs, s, x);
  if (!i) throw domain_error("S: no i >= 1 with Y = ft^i(X)");
  return star_iter(cs, s.mor, x, *i);
}

Section op_St(const CSystem& cs, const Section& s, const Section& r) {
  auto i = subst_offset(cs, s, r.target());
  if (!i) throw domain_error("S~: no i >= 1 with Y = ft^i(X)");
  return sect_pull(cs, s.mor, r, *i);
}

Section op_delta(const CSystem& cs, ObHandle x) {
  if (x.length == 0) throw domain_error("delta: l(X) must be positive");
  return cs.section_of(cs.identity(x));
}

MorHandle solve_pullback(const CSystem& cs, MorHandle g1, MorHandle g2, MorHandle f,
                         ObHandle x) {
  if (x.length == 0) throw domain_error("solve_pullback: l(X) must be positive");
  if (f.tgt != cs.ft(x)) throw domain_error("solve_pullback: target(f) must be ft(X)");
  if (g2.tgt != x) throw domain_error("solve_pullback: target(g2) must be X");
  if (g1.tgt != f.src) throw domain_error("solve_pullback: target(g1) must be source(f)");
  if (cs.compose(g1, f) != ft_mor(cs, g2))
    throw domain_error("solve_pullback: cone does not commute (g1 . f != ft(g2))");
  ObHandle fstar = cs.star(f, x);
  return cs.compose(cs.section_of(g2).mor, cs.q_map(g1, fstar));
}

// ---------------------------------------------------------------------------
// Axiom checkers

std::vector<CheckReport> check_c0_axioms(const CSystem& cs, const Fragment& frag) {
  std::vector<CheckReport> out;
  const Budget& budget = frag.budget;
  ObHandle pt = cs.pt();

  {
    CheckReport r{"c0/1-length-zero"};
    std::uint64_t zeros = 0;
    for (ObHandle x : frag.objects) {
      ++r.cases;
      if (x.length == 0) {
        ++zeros;
        if (x != pt) r.add_counterexample(ob_str(cs, x), "pt", "distinct length-0 object");
      }
    }
    if (zeros != 1)
      r.add_counterexample("fragment", "exactly one length-0 object", std::to_string(zeros));
    r.finish();
    out.push_back(std::move(r));
  }
  {
    CheckReport r{"c0/2-ft-length"};
    for (ObHandle x : frag.objects) {
      if (x.length == 0) continue;
      ++r.cases;
      ObHandle f = cs.ft(x);
      if (f.length != x.length - 1)
        r.add_counterexample(ob_str(cs, x), "l(ft(X)) = l(X)-1", std::to_string(f.length));
      if (!frag.has_object(f))
        r.add_counterexample(ob_str(cs, x), "ft(X) in fragment", ob_str(cs, f));
    }
    r.finish();
    out.push_back(std::move(r));
  }
  {
    CheckReport r{"c0/3-ft-pt"};
    ++r.cases;
    if (cs.ft(pt) != pt) r.add_counterexample("pt", "ft(pt) = pt", ob_str(cs, cs.ft(pt)));
    r.finish();
    out.push_back(std::move(r));
  }
  {
    CheckReport r{"c0/4-pt-final"};
    for (ObHandle y : frag.objects) {
      ++r.cases;
      const HomSet& hs = frag.hom(y, pt);
      if (hs.truncated) {
        ++r.skipped_cases;
        continue;
      }
      if (hs.mors.size() != 1)
        r.add_counterexample(ob_str(cs, y), "|Mor(Y, pt)| = 1", std::to_string(hs.mors.size()));
    }
    r.finish();
    out.push_back(std::move(r));
  }
  {
    CheckReport r{"c0/5-canonical-square"};
  guarded_sweep(r, [&] {
    for (ObHandle x : frag.objects) {
      if (x.length == 0) continue;
      ObHandle ftx = cs.ft(x);
      for (ObHandle y : frag.objects) {
        const HomSet& hs = frag.hom(y, ftx);
        if (hs.truncated) ++r.skipped_cases;
        for (MorHandle f : hs.mors) {
          ++r.cases;
          ObHandle s = cs.star(f, x);
          if (s.length == 0)
            r.add_counterexample(mor_str(cs, f), "l(f*X) > 0", ob_str(cs, s));
          if (cs.ft(s) != y)
            r.add_counterexample(mor_str(cs, f), "ft(f*X) = Y", ob_str(cs, cs.ft(s)));
          MorHandle left = cs.compose(cs.proj(s), f);
          MorHandle right = cs.compose(cs.q_map(f, x), cs.proj(x));
          if (left != right)
            r.add_counterexample("f=" + mor_str(cs, f) + " X=" + ob_str(cs, x),
                                 "p_{f*X} . f = q(f,X) . p_X", "square does not commute");
        }
      }
    }
  });
    r.finish();
    out.push_back(std::move(r));
  }
  {
    CheckReport r{"c0/6-identity-base-change"};
  guarded_sweep(r, [&] {
    for (ObHandle x : frag.objects) {
      if (x.length == 0) continue;
      ++r.cases;
      MorHandle idf = cs.identity(cs.ft(x));
      if (cs.star(idf, x) != x)
        r.add_counterexample(ob_str(cs, x), "id*(X) = X", ob_str(cs, cs.star(idf, x)));
      if (cs.q_map(idf, x) != cs.identity(x))
        r.add_counterexample(ob_str(cs, x), "q(id, X) = id_X", mor_str(cs, cs.q_map(idf, x)));
    }
  });
    r.finish();
    out.push_back(std::move(r));
  }
  {
    CheckReport r{"c0/7-functoriality"};
  guarded_sweep(r, [&] {
    for (ObHandle x : frag.objects) {
      if (x.length == 0) continue;
      ObHandle ftx = cs.ft(x);
      for (ObHandle y : frag.objects) {
        const HomSet& fs = frag.hom(y, ftx);
        if (fs.truncated) ++r.skipped_cases;
        for (ObHandle z : frag.objects) {
          const HomSet& gs = frag.hom(z, y);
          if (gs.truncated) ++r.skipped_cases;
          std::uint64_t tag =
              (static_cast<std::uint64_t>(x.id) << 40) ^ (static_cast<std::uint64_t>(y.id) << 20) ^ z.id ^ 7;
          bool sampled = detail::for_pairs(
              gs.mors.size(), fs.mors.size(), budget, tag, [&](std::uint64_t i, std::uint64_t j) {
                MorHandle g = gs.mors[i];
                MorHandle f = fs.mors[j];
                ++r.cases;
                MorHandle gf = cs.compose(g, f);
                ObHandle lhs_ob = cs.star(gf, x);
                ObHandle rhs_ob = cs.star(g, cs.star(f, x));
                if (lhs_ob != rhs_ob)
                  r.add_counterexample("g=" + mor_str(cs, g) + " f=" + mor_str(cs, f),
                                       "(gf)*X = g*(f*X)",
                                       ob_str(cs, lhs_ob) + " vs " + ob_str(cs, rhs_ob));
                MorHandle lhs_q = cs.q_map(gf, x);
                MorHandle rhs_q = cs.compose(cs.q_map(g, cs.star(f, x)), cs.q_map(f, x));
                if (lhs_q != rhs_q)
                  r.add_counterexample("g=" + mor_str(cs, g) + " f=" + mor_str(cs, f),
                                       "q(gf,X) = q(g,f*X) . q(f,X)", "tables differ");
              });
          if (sampled) ++r.skipped_cases;
        }
      }
    }
  });
    r.finish();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> check_s_axioms(const CSystem& cs, const Fragment& frag) {
  std::vector<CheckReport> out;
  const Budget& budget = frag.budget;

  CheckReport r1{"s/1-endpoints"};
  CheckReport r2{"s/2-section-of-projection"};
  CheckReport r3{"s/3-canonical-decomposition"};
  guarded_sweep(r1, [&] {
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    for (ObHandle y : frag.objects) {
      const HomSet& hs = frag.hom(y, x);
      if (hs.truncated) {
        ++r1.skipped_cases;
        ++r2.skipped_cases;
        ++r3.skipped_cases;
      }
      for (MorHandle f : hs.mors) {
        ++r1.cases;
        ++r2.cases;
        ++r3.cases;
        MorHandle ftm = ft_mor(cs, f);
        ObHandle expected_tgt = cs.star(ftm, x);
        Section s = cs.section_of(f);
        if (s.mor.src != y || s.mor.tgt != expected_tgt)
          r1.add_counterexample(mor_str(cs, f), "s_f : Y -> (ft(f))*X", mor_str(cs, s.mor));
        if (cs.compose(s.mor, cs.proj(expected_tgt)) != cs.identity(y))
          r2.add_counterexample(mor_str(cs, f), "s_f . p = Id_Y", mor_str(cs, s.mor));
        if (cs.compose(s.mor, cs.q_map(ftm, x)) != f)
          r3.add_counterexample(mor_str(cs, f), "f = s_f . q(ft(f), X)", mor_str(cs, s.mor));
      }
    }
  }
  });
  r1.finish();
  r2.finish();
  r3.finish();
  out.push_back(std::move(r1));
  out.push_back(std::move(r2));
  out.push_back(std::move(r3));

  CheckReport r4{"s/4-substitution-stability"};
  guarded_sweep(r4, [&] {
  for (ObHandle u : frag.objects) {
    if (u.length == 0) continue;
    ObHandle ftu = cs.ft(u);
    for (ObHandle x : frag.objects) {
      if (x.length == 0) continue;
      ObHandle ftx = cs.ft(x);
      const HomSet& gs = frag.hom(ftx, ftu);
      if (gs.truncated) ++r4.skipped_cases;
      // q(g, U) and s_f are constant along one sampling axis each; cache
      // them so a sampled sweep costs one composition per pair.
      std::map<std::uint32_t, MorHandle> q_of_g;
      for (ObHandle y : frag.objects) {
        const HomSet& fsset = frag.hom(y, x);
        if (fsset.truncated) ++r4.skipped_cases;
        std::map<std::uint32_t, Section> sf_of_f;
        std::uint64_t tag = (static_cast<std::uint64_t>(u.id) << 40) ^
                            (static_cast<std::uint64_t>(x.id) << 20) ^ y.id ^ 0x54;
        bool sampled = detail::for_pairs(
            gs.mors.size(), fsset.mors.size(), budget, tag,
            [&](std::uint64_t gi, std::uint64_t fi) {
              MorHandle g = gs.mors[gi];
              if (cs.star(g, u) != x) return;
              auto qit = q_of_g.find(g.id);
              if (qit == q_of_g.end()) qit = q_of_g.emplace(g.id, cs.q_map(g, u)).first;
              MorHandle f = fsset.mors[fi];
              ++r4.cases;
              auto sit = sf_of_f.find(f.id);
              if (sit == sf_of_f.end()) sit = sf_of_f.emplace(f.id, cs.section_of(f)).first;
              if (sit->second != cs.section_of(cs.compose(f, qit->second)))
                r4.add_counterexample("f=" + mor_str(cs, f) + " g=" + mor_str(cs, g),
                                      "s_f = s_{f . q(g,U)}", "sections differ");
            });
        if (sampled) ++r4.skipped_cases;
      }
    }
  }
  });
  r4.finish();
  out.push_back(std::move(r4));
  return out;
}

CheckReport check_pullback_universal(const CSystem& cs, MorHandle f, ObHandle x,
                                     const Fragment& frag) {
  if (x.length == 0) throw domain_error("pullback check: l(X) must be positive");
  if (f.tgt != cs.ft(x)) throw domain_error("pullback check: target(f) must be ft(X)");
  CheckReport r{"pullback-universal"};
  ObHandle y = f.src;
  ObHandle s = cs.star(f, x);
  MorHandle q = cs.q_map(f, x);
  const Budget& budget = frag.budget;
  guarded_sweep(r, [&] {

  for (ObHandle z : frag.objects) {
    HomSet zs = frag.has_object(s) ? frag.hom(z, s) : cs.enum_hom(z, s, budget);
    const HomSet& zy = frag.hom(z, y);
    const HomSet& zx = frag.hom(z, x);
    if (zs.truncated || zy.truncated || zx.truncated) {
      ++r.skipped_cases;
      continue;
    }
    // Fillers keyed by the cone they induce.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<MorHandle>> fillers;
    for (MorHandle g : zs.mors)
      fillers[{ft_mor(cs, g).id, cs.compose(g, q).id}].push_back(g);
    // Cones grouped by their base leg.
    std::map<std::uint32_t, std::vector<MorHandle>> cones_by_base;
    for (MorHandle g2 : zx.mors) cones_by_base[ft_mor(cs, g2).id].push_back(g2);

    // The solved filler is s_{g2} . q(g1, f*X); q(g1, f*X) is constant in
    // g2 and s_{g2} is constant in g1, so hoist and cache both.
    std::map<std::uint32_t, MorHandle> sf_of_g2;
    for (MorHandle g1 : zy.mors) {
      auto it = cones_by_base.find(cs.compose(g1, f).id);
      if (it == cones_by_base.end()) continue;
      MorHandle qg1 = cs.q_map(g1, s);
      for (MorHandle g2 : it->second) {
        ++r.cases;
        auto fit = fillers.find({g1.id, g2.id});
        std::size_t n = fit == fillers.end() ? 0 : fit->second.size();
        if (n != 1) {
          if (r.counterexamples_full())
            r.note_failure();
          else
            r.add_counterexample("g1=" + mor_str(cs, g1) + " g2=" + mor_str(cs, g2),
                                 "exactly one filler", std::to_string(n) + " fillers");
          continue;
        }
        auto sit = sf_of_g2.find(g2.id);
        if (sit == sf_of_g2.end())
          sit = sf_of_g2.emplace(g2.id, cs.section_of(g2).mor).first;
        MorHandle g = cs.compose(sit->second, qg1);
        if (g != fit->second.front()) {
          if (r.counterexamples_full())
            r.note_failure();
          else
            r.add_counterexample("g1=" + mor_str(cs, g1) + " g2=" + mor_str(cs, g2),
                                 mor_str(cs, fit->second.front()), mor_str(cs, g));
        }
      }
    }
  }
  });
  r.finish();
  return r;
}

CheckReport check_sf_from_pullback(const CSystem& cs, const Fragment& frag) {
  CheckReport r{"sf-from-pullback"};
  guarded_sweep(r, [&] {
  Budget fb = frag.budget;
  fb.pair_cap = std::min<std::uint64_t>(fb.pair_cap, 512);
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    for (ObHandle y : frag.objects) {
      const HomSet& hs = frag.hom(y, x);
      if (hs.truncated) ++r.skipped_cases;
      bool sampled = detail::for_pairs(
          hs.mors.size(), 1, fb, 0x5f ^ (static_cast<std::uint64_t>(y.id) << 20) ^ x.id,
          [&](std::uint64_t fi, std::uint64_t) {
            MorHandle f = hs.mors[fi];
            ++r.cases;
            MorHandle ftm = ft_mor(cs, f);
            ObHandle s = cs.star(ftm, x);
            MorHandle q = cs.q_map(ftm, x);
            // A filler for the cone (Id_Y, f) has ft equal to Id_Y, so it is
            // a section of the projection of f*X; scan those.
            bool trunc = false;
            std::vector<Section> secs = cs.enum_sections(s, frag.budget, &trunc);
            if (trunc) {
              ++r.skipped_cases;
              return;
            }
            std::vector<MorHandle> found;
            for (const Section& g : secs)
              if (g.mor.src == y && cs.compose(g.mor, q) == f) found.push_back(g.mor);
            if (found.size() != 1) {
              if (r.counterexamples_full())
                r.note_failure();
              else
                r.add_counterexample(mor_str(cs, f), "unique section-filler",
                                     std::to_string(found.size()) + " fillers");
              return;
            }
            if (found.front() != cs.section_of(f).mor) {
              if (r.counterexamples_full())
                r.note_failure();
              else
                r.add_counterexample(mor_str(cs, f), mor_str(cs, found.front()),
                                     mor_str(cs, cs.section_of(f).mor));
            }
          });
      if (sampled) ++r.skipped_cases;
    }
  }
  });
  r.finish();
  return r;
}

}  // namespace csys
