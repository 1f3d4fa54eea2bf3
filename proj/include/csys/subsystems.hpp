#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csys/fragment.hpp"
#include "csys/kernel.hpp"

namespace csys {

struct SubsystemSeed {
  std::vector<ObHandle> objects;
  std::vector<Section> sections;
};

/// A windowed C-subsystem candidate: the pair (B, B-tilde) saturated under
/// the six closure conditions as far as results of length <= L reach.
/// Productions past the window land on the frontier and are not applied
/// further, so every "closed" claim is scoped to the window.
struct SubsystemWindow {
  std::uint32_t L = 0;
  std::vector<ObHandle> B;         // sorted by (length, encoding)
  std::vector<Section> B_tilde;    // sorted by (target length, encoding)
  std::vector<std::string> frontier;  // out-of-window productions, decoded
  bool saturated_within_window = false;

  bool contains(ObHandle x) const { return b_ids.count(x.id) != 0; }
  bool contains(const Section& s) const { return bt_ids.count(s.mor.id) != 0; }

  std::set<std::uint32_t> b_ids;
  std::set<std::uint32_t> bt_ids;
};

/// Smallest windowed pair containing the seed, closed under the six
/// conditions -- plus object-level weakening and substitution, which the
/// unwindowed closure derives through sections one level higher --
/// restricted to results of length <= L. Deterministic worklist.
SubsystemWindow close_window(const CSystem& cs, const SubsystemSeed& seed, std::uint32_t L);

/// Verifies the six closure conditions on an arbitrary pair; violations
/// whose result lies beyond the window count as skipped cases.
CheckReport check_closed(const CSystem& cs, const SubsystemWindow& window);

enum class Membership { Yes, No, Overflow };

/// Inductive morphism membership: f : Y -> pt is a member iff Y is in B;
/// otherwise f is a member iff target(f) is in B, ft(f) is a member and s_f
/// is in B-tilde. Overflow means the recursion needed a section beyond the
/// window.
Membership mor_member(const CSystem& cs, MorHandle f, const SubsystemWindow& window);

/// The lemma suite of the subsystem correspondence: projections,
/// section pullbacks, composition closure, q-closure, and the pullback
/// property inside the subsystem, quantified over fragment members.
std::vector<CheckReport> verify_subsystem_lemmas(const CSystem& cs,
                                                 const SubsystemWindow& window,
                                                 const Fragment& frag);

/// (B, B-tilde)-equal windows induce identical membership; B-tilde-equal
/// windows have equal B above length 0 (within the window interior).
std::vector<CheckReport> check_determination(const CSystem& cs, const SubsystemWindow& w1,
                                             const SubsystemWindow& w2, const Fragment& frag);

nlohmann::json window_to_json(const CSystem& cs, const SubsystemWindow& window);
SubsystemSeed seed_from_json(const CSystem& cs, const nlohmann::json& j);

}  // namespace csys
