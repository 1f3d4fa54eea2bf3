#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csys/types.hpp"

namespace csys {

/// Abstract carrier of the contextual structure: the length function, the
/// final object pt, the father map ft with its canonical projections, the
/// strict base change (star, q), composition, identities, the section
/// operation s_f, and bounded enumeration.
///
/// Composition is diagrammatic: compose(f, g) is "f then g" and requires
/// f.tgt == g.src. Handle equality is structural equality: instances
/// intern canonical encodings, so == on handles decides the on-the-nose
/// equalities the axioms demand.
///
/// Partial operations check their side conditions and throw domain_error;
/// table-backed instances additionally throw window_error when asked for
/// data beyond their window.
class CSystem {
 public:
  virtual ~CSystem() = default;

  virtual std::string kind() const = 0;
  virtual nlohmann::json config_json() const = 0;

  ObHandle pt() const { return do_pt(); }
  std::uint32_t length(ObHandle x) const { return x.length; }
  virtual ObHandle ft(ObHandle x) const = 0;

  /// p_X : X -> ft(X). Defined for every X; p_pt = Id_pt.
  MorHandle proj(ObHandle x) const;

  /// f^*X for f : Y -> ft(X), l(X) > 0.
  ObHandle star(MorHandle f, ObHandle x) const;

  /// q(f, X) : f^*X -> X under the same side conditions as star.
  MorHandle q_map(MorHandle f, ObHandle x) const;

  /// Diagrammatic composition: f then g; requires f.tgt == g.src.
  MorHandle compose(MorHandle f, MorHandle g) const;

  MorHandle identity(ObHandle x) const { return do_identity(x); }

  /// s_f for f : Y -> X with l(X) > 0; lands in tilde-Ob.
  Section section_of(MorHandle f) const;

  bool is_section(MorHandle m) const;

  /// Objects with l <= max_len in canonical order. Sets *truncated when the
  /// point cap excluded objects.
  virtual std::vector<ObHandle> enum_objects(std::uint32_t max_len, const Budget& b,
                                             bool* truncated) const = 0;

  /// All morphisms Y -> X, exhaustively when the hom set fits in
  /// budget.hom_cap, otherwise a deterministic sample flagged as truncated.
  HomSet enum_hom(ObHandle y, ObHandle x, const Budget& b) const;

  /// All sections of p_X (l(X) > 0), subject to the same cap.
  std::vector<Section> enum_sections(ObHandle x, const Budget& b, bool* truncated) const;

  virtual std::string ob_encoding(ObHandle x) const = 0;
  virtual std::string mor_encoding(MorHandle m) const = 0;
  virtual std::optional<ObHandle> ob_from_encoding(const std::string& enc) const = 0;
  virtual std::optional<MorHandle> mor_from_encoding(const std::string& enc) const = 0;

  virtual bool has_points() const = 0;
  virtual std::uint64_t point_count(ObHandle x) const;

 protected:
  virtual ObHandle do_pt() const = 0;
  virtual MorHandle do_proj(ObHandle x) const = 0;
  virtual ObHandle do_star(MorHandle f, ObHandle x) const = 0;
  virtual MorHandle do_q(MorHandle f, ObHandle x) const = 0;
  virtual MorHandle do_comp(MorHandle f, MorHandle g) const = 0;
  virtual MorHandle do_identity(ObHandle x) const = 0;
  virtual MorHandle do_sf(MorHandle f) const = 0;
  virtual HomSet do_enum_hom(ObHandle y, ObHandle x, const Budget& b) const = 0;
  virtual std::vector<MorHandle> do_enum_sections(ObHandle x, const Budget& b,
                                                  bool* truncated) const = 0;
};

using CSystemPtr = std::shared_ptr<const CSystem>;

}  // namespace csys
