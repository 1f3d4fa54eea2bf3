#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "csys/csystem.hpp"

namespace csys {

/// The length- and budget-bounded enumerated portion of an instance over
/// which every check is quantified. Core objects have l <= budget.max_len;
/// aux objects are the base changes f^*X produced by core morphisms (length
/// up to max_len + 1), kept so that the window is s_f-closed. Truncation is
/// always flagged, never silent.
struct Fragment {
  CSystemPtr cs;
  Budget budget;

  std::vector<ObHandle> objects;  // core, canonical order
  std::vector<ObHandle> aux;      // sorted by (length, encoding)
  bool objects_truncated = false;

  // Hom tables between all ordered pairs of core objects.
  std::map<std::pair<std::uint32_t, std::uint32_t>, HomSet> homs;
  bool homs_truncated = false;

  std::vector<Section> sections;      // into core objects with l > 0
  std::vector<Section> aux_sections;  // into aux objects
  bool sections_truncated = false;

  const HomSet& hom(ObHandle y, ObHandle x) const;
  bool has_object(ObHandle x) const;      // core
  bool has_any_object(ObHandle x) const;  // core or aux

  /// Core sections followed by aux sections, the congruence carrier.
  std::vector<Section> all_sections() const;
};

/// Deterministic given (instance config, budget). Includes pt and the
/// ft-closure of every listed object.
Fragment enumerate_fragment(CSystemPtr cs, const Budget& budget);

}  // namespace csys
