#include "csys/fragment.hpp"

#include <algorithm>
#include <set>

namespace csys {

const HomSet& Fragment::hom(ObHandle y, ObHandle x) const {
  auto it = homs.find({y.id, x.id});
  if (it == homs.end()) throw window_error("fragment: hom set not enumerated");
  return it->second;
}

bool Fragment::has_object(ObHandle x) const {
  return std::find(objects.begin(), objects.end(), x) != objects.end();
}

bool Fragment::has_any_object(ObHandle x) const {
  return has_object(x) || std::find(aux.begin(), aux.end(), x) != aux.end();
}

std::vector<Section> Fragment::all_sections() const {
  std::vector<Section> out = sections;
  out.insert(out.end(), aux_sections.begin(), aux_sections.end());
  return out;
}

Fragment enumerate_fragment(CSystemPtr cs, const Budget& budget) {
  Fragment frag;
  frag.cs = cs;
  frag.budget = budget;
  frag.objects = cs->enum_objects(budget.max_len, budget, &frag.objects_truncated);

  for (ObHandle y : frag.objects) {
    for (ObHandle x : frag.objects) {
      HomSet hs = cs->enum_hom(y, x, budget);
      frag.homs_truncated = frag.homs_truncated || hs.truncated;
      frag.homs.emplace(std::make_pair(y.id, x.id), std::move(hs));
    }
  }

  // Base changes of core morphisms; anything past max_len becomes aux so
  // that every s_f of a core morphism has its target in the window.
  std::set<std::uint32_t> core_ids;
  for (ObHandle o : frag.objects) core_ids.insert(o.id);
  std::vector<ObHandle> aux;
  std::set<std::uint32_t> aux_ids;
  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    ObHandle ftx = cs->ft(x);
    for (ObHandle y : frag.objects) {
      for (MorHandle f : frag.hom(y, ftx).mors) {
        ObHandle s = cs->star(f, x);
        if (core_ids.count(s.id) || aux_ids.count(s.id)) continue;
        aux_ids.insert(s.id);
        aux.push_back(s);
      }
    }
  }
  std::sort(aux.begin(), aux.end(), [&](ObHandle a, ObHandle b) {
    if (a.length != b.length) return a.length < b.length;
    return cs->ob_encoding(a) < cs->ob_encoding(b);
  });
  frag.aux = std::move(aux);

  for (ObHandle x : frag.objects) {
    if (x.length == 0) continue;
    bool trunc = false;
    for (Section s : cs->enum_sections(x, budget, &trunc)) frag.sections.push_back(s);
    frag.sections_truncated = frag.sections_truncated || trunc;
  }
  for (ObHandle x : frag.aux) {
    bool trunc = false;
    for (Section s : cs->enum_sections(x, budget, &trunc)) frag.aux_sections.push_back(s);
    frag.sections_truncated = frag.sections_truncated || trunc;
  }
  return frag;
}

}  // namespace csys
