#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csys/fragment.hpp"
#include "csys/kernel.hpp"

namespace csys {

/// Merge-find partition over a fixed carrier of handle ids. The class
/// representative is the minimal id in the class.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<std::uint32_t> ids);

  bool contains(std::uint32_t id) const { return parent_.count(id) != 0; }
  std::uint32_t rep(std::uint32_t id) const;
  bool related(std::uint32_t a, std::uint32_t b) const;
  /// Returns true when two classes were actually joined.
  bool merge(std::uint32_t a, std::uint32_t b);

  const std::vector<std::uint32_t>& ids() const { return ids_; }
  std::size_t class_count() const;
  std::map<std::uint32_t, std::vector<std::uint32_t>> classes() const;

  friend bool operator==(const Partition& a, const Partition& b);

 private:
  std::vector<std::uint32_t> ids_;
  mutable std::map<std::uint32_t, std::uint32_t> parent_;
};

using ObPartition = Partition;    // over fragment objects (core and aux)
using SectPartition = Partition;  // over fragment sections, keyed by mor id
using MorPartition = Partition;   // over fragment morphisms between core objects

struct RelationSeed {
  std::vector<std::pair<ObHandle, ObHandle>> ob_pairs;
  std::vector<std::pair<Section, Section>> sect_pairs;
};

RelationSeed relation_from_json(const CSystem& cs, const nlohmann::json& j);

struct RegularCongruenceWindow {
  ObPartition ob;
  SectPartition sect;
  MorPartition mor;
  bool mor_populated = false;
  std::map<std::string, CheckStatus> condition_status;
};

/// Smallest pair of partitions containing the seed and closed, within the
/// fragment, under merging outputs of ft, partial, T, T-tilde, S, S-tilde
/// and delta whenever the inputs are merged and both outputs lie in the
/// fragment. Rejects seeds relating objects (or section targets) of
/// different length.
std::pair<ObPartition, SectPartition> cong_close(const CSystem& cs, const RelationSeed& seed,
                                                 const Fragment& frag);

/// The four conditions a pair (~, ~=) must satisfy to present a morphism
/// relation: operation compatibility, length preservation, and the two
/// witness existence conditions. Existence is checked, never forced.
CheckReport check_prop_conditions(const CSystem& cs, const ObPartition& ob,
                                  const SectPartition& sect, const Fragment& frag);

/// The induced morphism relation, by induction on target length: maps to pt
/// are related iff their sources are; otherwise f ~ g iff their targets and
/// sources are related, s_f ~= s_g, and ft(f) ~ ft(g).
MorPartition extend_to_mor(const CSystem& cs, const ObPartition& ob, const SectPartition& sect,
                           const Fragment& frag);

/// The four defining conditions of a regular congruence on (ob, mor):
/// compatibility with source, target, identity, ft, p, composition, star,
/// q and s_f; length preservation; object lifting; morphism lifting.
CheckReport check_congruence_def(const CSystem& cs, const ObPartition& ob,
                                 const MorPartition& mor, const Fragment& frag);

/// Whether s of the iterated projection p_{X,i} equals the nested
/// weakening of the diagonal of ft^i(X). Requires 1 <= i < l(X).
bool proj_section_identity(const CSystem& cs, ObHandle x, std::uint32_t i);

struct QuotientResult {
  CSystemPtr cs;
  /// Representative independence of every induced operation; a failure here
  /// means the input relation was not a congruence.
  CheckReport well_defined;
};

/// The quotient instance: objects are ~-classes, morphisms are classes of
/// the induced relation, operations act through canonical representatives.
/// Operations that would need data past the fragment throw window_error.
QuotientResult build_quotient(const CSystem& cs, const RegularCongruenceWindow& rel,
                              const Fragment& frag);

/// Every section of the quotient is the class of a section of the base
/// instance: section counts per quotient object match ~=-class counts, and
/// the two enumeration paths (section table, hom filter) agree.
CheckReport check_tilde_ob_quotient(const CSystem& cs, const RegularCongruenceWindow& rel,
                                    const Fragment& frag);

/// Both round trips: the restriction of the extended morphism relation to
/// sections reproduces ~=, and extending (ob, ~=) again reproduces mor.
CheckReport roundtrip_injectivity(const CSystem& cs, const RegularCongruenceWindow& rel,
                                  const Fragment& frag);

}  // namespace csys
