#include "csys/csystem.hpp"

#include <nlohmann/json.hpp>

namespace csys {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

MorHandle CSystem::proj(ObHandle x) const { return do_proj(x); }

ObHandle CSystem::star(MorHandle f, ObHandle x) const {
  if (x.length == 0) throw domain_error("star: l(X) must be positive");
  if (f.tgt != ft(x)) throw domain_error("star: target(f) must equal ft(X)");
  return do_star(f, x);
}

MorHandle CSystem::q_map(MorHandle f, ObHandle x) const {
  if (x.length == 0) throw domain_error("q: l(X) must be positive");
  if (f.tgt != ft(x)) throw domain_error("q: target(f) must equal ft(X)");
  return do_q(f, x);
}

MorHandle CSystem::compose(MorHandle f, MorHandle g) const {
  if (f.tgt != g.src) throw domain_error("compose: target(f) must equal source(g)");
  return do_comp(f, g);
}

Section CSystem::section_of(MorHandle f) const {
  if (f.tgt.length == 0) throw domain_error("s_f: l(target(f)) must be positive");
  return Section{do_sf(f)};
}

bool CSystem::is_section(MorHandle m) const {
  if (m.tgt.length == 0) return false;
  if (m.src != ft(m.tgt)) return false;
  return compose(m, proj(m.tgt)) == identity(m.src);
}

HomSet CSystem::enum_hom(ObHandle y, ObHandle x, const Budget& b) const {
  return do_enum_hom(y, x, b);
}

std::vector<Section> CSystem::enum_sections(ObHandle x, const Budget& b, bool* truncated) const {
  if (x.length == 0) throw domain_error("sections: l(X) must be positive");
  std::vector<Section> out;
  for (MorHandle m : do_enum_sections(x, b, truncated)) out.push_back(Section{m});
  return out;
}

std::uint64_t CSystem::point_count(ObHandle) const {
  throw unsupported_error(kind() + ": points are not supported");
}

}  // namespace csys
