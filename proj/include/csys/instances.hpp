#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "csys/csystem.hpp"

namespace csys {

/// Degenerate instance: one object per length, one morphism per hom set.
/// Every axiom holds by uniqueness; points() is unsupported. Exists to give
/// trivial baselines for every checker.
class UnitCS final : public CSystem {
 public:
  UnitCS() = default;

  std::string kind() const override { return "unit"; }
  nlohmann::json config_json() const override;

  ObHandle ft(ObHandle x) const override;
  std::vector<ObHandle> enum_objects(std::uint32_t max_len, const Budget& b,
                                     bool* truncated) const override;
  std::string ob_encoding(ObHandle x) const override;
  std::string mor_encoding(MorHandle m) const override;
  std::optional<ObHandle> ob_from_encoding(const std::string& enc) const override;
  std::optional<MorHandle> mor_from_encoding(const std::string& enc) const override;
  bool has_points() const override { return false; }

 protected:
  ObHandle do_pt() const override { return ob(0); }
  MorHandle do_proj(ObHandle x) const override;
  ObHandle do_star(MorHandle f, ObHandle x) const override;
  MorHandle do_q(MorHandle f, ObHandle x) const override;
  MorHandle do_comp(MorHandle f, MorHandle g) const override;
  MorHandle do_identity(ObHandle x) const override;
  MorHandle do_sf(MorHandle f) const override;
  HomSet do_enum_hom(ObHandle y, ObHandle x, const Budget& b) const override;
  std::vector<MorHandle> do_enum_sections(ObHandle x, const Budget& b,
                                          bool* truncated) const override;

 private:
  ObHandle ob(std::uint32_t len) const { return ObHandle{len, len}; }
  MorHandle mor(ObHandle src, ObHandle tgt) const;

  mutable std::mutex mu_;
  mutable std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mor_index_;
  mutable std::vector<std::pair<std::uint32_t, std::uint32_t>> mors_;
};

/// Shared machinery for the set-semantic instances: objects carry a finite
/// canonical point set stratified over ft, morphisms are tabulated
/// functions between point sets. Base change, q, composition and s_f are
/// computed on tables, so the strict equalities hold on the nose via
/// interning of canonical encodings.
class SemanticCS : public CSystem {
 public:
  ObHandle ft(ObHandle x) const override;
  std::string ob_encoding(ObHandle x) const override;
  std::string mor_encoding(MorHandle m) const override;
  std::optional<MorHandle> mor_from_encoding(const std::string& enc) const override;
  bool has_points() const override { return true; }
  std::uint64_t point_count(ObHandle x) const override;

  /// Canonical point encodings of X, in enumeration order.
  std::vector<std::string> point_encodings(ObHandle x) const;

  const std::vector<std::uint32_t>& mor_table(MorHandle m) const;

 protected:
  struct ObRec {
    std::string enc;
    std::uint32_t len = 0;
    std::uint32_t ft_id = 0;
    std::uint64_t npts = 0;
    // For len > 0: point i lies over ft-point parent[i] as its elt[i]-th
    // fiber element; offset[p] is the index of the first point over p.
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> elt;
    std::vector<std::uint64_t> offset;
  };
  struct MorRec {
    std::uint32_t src_id = 0;
    std::uint32_t tgt_id = 0;
    std::vector<std::uint32_t> table;
  };

  MorHandle do_proj(ObHandle x) const override;
  MorHandle do_q(MorHandle f, ObHandle x) const override;
  MorHandle do_comp(MorHandle f, MorHandle g) const override;
  MorHandle do_identity(ObHandle x) const override;
  MorHandle do_sf(MorHandle f) const override;
  HomSet do_enum_hom(ObHandle y, ObHandle x, const Budget& b) const override;
  std::vector<MorHandle> do_enum_sections(ObHandle x, const Budget& b,
                                          bool* truncated) const override;

  std::uint32_t intern_ob(ObRec rec) const;
  MorHandle intern_mor(ObHandle src, ObHandle tgt, std::vector<std::uint32_t> table) const;
  const ObRec& obrec(std::uint32_t id) const { return obs_[id]; }
  ObHandle handle_of(std::uint32_t id) const { return ObHandle{id, obs_[id].len}; }
  std::optional<std::uint32_t> find_ob(const std::string& enc) const;

  /// Fiber size of X over ft-point p (len > 0).
  std::uint64_t fiber_size(const ObRec& x, std::uint32_t p) const {
    return x.offset[p + 1] - x.offset[p];
  }

  mutable std::mutex mu_;

 private:
  HomSet enum_hom_uncached(ObHandle y, ObHandle x, const Budget& b) const;

  mutable std::vector<ObRec> obs_;
  mutable std::unordered_map<std::string, std::uint32_t> ob_index_;
  mutable std::vector<MorRec> mors_;
  mutable std::unordered_map<std::string, std::uint32_t> mor_index_;
  mutable std::map<std::array<std::uint64_t, 4>, HomSet> hom_memo_;
};

/// Non-dependent contexts over fixed base sets: objects of length n are
/// n-tuples of base-set indices, points are tuples of elements, morphisms
/// are all tabulated functions between point sets.
class ContextCS final : public SemanticCS {
 public:
  explicit ContextCS(std::vector<std::uint32_t> base_sizes);

  std::string kind() const override { return "context"; }
  nlohmann::json config_json() const override;
  std::vector<ObHandle> enum_objects(std::uint32_t max_len, const Budget& b,
                                     bool* truncated) const override;
  std::optional<ObHandle> ob_from_encoding(const std::string& enc) const override;

  ObHandle object_of(const std::vector<std::uint32_t>& bases) const;

 protected:
  ObHandle do_pt() const override;
  ObHandle do_star(MorHandle f, ObHandle x) const override;

 private:
  ObHandle extend(ObHandle parent, std::uint32_t base) const;
  std::vector<std::uint32_t> tuple_of(ObHandle x) const;

  std::vector<std::uint32_t> base_sizes_;
  mutable std::mutex tuples_mu_;
  mutable std::vector<std::vector<std::uint32_t>> tuples_;
};

/// Telescopes over a finite universe: an object is pt or (X, F) with F a
/// tabulated family of codes over the points of X; points of (X, F) are
/// dependent pairs. Base change composes family tables, so strictness
/// holds by construction.
class UniverseCS final : public SemanticCS {
 public:
  explicit UniverseCS(std::vector<std::uint32_t> el_sizes);

  std::string kind() const override { return "universe"; }
  nlohmann::json config_json() const override;
  std::vector<ObHandle> enum_objects(std::uint32_t max_len, const Budget& b,
                                     bool* truncated) const override;
  std::optional<ObHandle> ob_from_encoding(const std::string& enc) const override;

  /// Object (X, F) for a family table over the points of X.
  ObHandle extend(ObHandle x, const std::vector<std::uint32_t>& family) const;

 protected:
  ObHandle do_pt() const override;
  ObHandle do_star(MorHandle f, ObHandle x) const override;

 private:
  std::vector<std::uint32_t> el_sizes_;
  mutable std::mutex fam_mu_;
  mutable std::vector<std::vector<std::uint32_t>> families_;
};

/// Deterministic single-operation corruption of a base instance, used for
/// mutation-sensitivity testing. The selected operation returns the
/// cyclically-next parallel answer whenever one exists.
class MutatedCS final : public CSystem {
 public:
  enum class Target { Q, Sf, Star, Comp };

  MutatedCS(CSystemPtr base, Target target);
  static std::optional<Target> target_from_name(const std::string& name);
  static std::string target_name(Target t);

  std::string kind() const override;
  nlohmann::json config_json() const override;
  ObHandle ft(ObHandle x) const override { return base_->ft(x); }
  std::vector<ObHandle> enum_objects(std::uint32_t max_len, const Budget& b,
                                     bool* truncated) const override {
    return base_->enum_objects(max_len, b, truncated);
  }
  std::string ob_encoding(ObHandle x) const override { return base_->ob_encoding(x); }
  std::string mor_encoding(MorHandle m) const override { return base_->mor_encoding(m); }
  std::optional<ObHandle> ob_from_encoding(const std::string& enc) const override {
    return base_->ob_from_encoding(enc);
  }
  std::optional<MorHandle> mor_from_encoding(const std::string& enc) const override {
    return base_->mor_from_encoding(enc);
  }
  bool has_points() const override { return base_->has_points(); }
  std::uint64_t point_count(ObHandle x) const override { return base_->point_count(x); }

 protected:
  ObHandle do_pt() const override { return base_->pt(); }
  MorHandle do_proj(ObHandle x) const override { return base_->proj(x); }
  ObHandle do_star(MorHandle f, ObHandle x) const override;
  MorHandle do_q(MorHandle f, ObHandle x) const override;
  MorHandle do_comp(MorHandle f, MorHandle g) const override;
  MorHandle do_identity(ObHandle x) const override { return base_->identity(x); }
  MorHandle do_sf(MorHandle f) const override;
  HomSet do_enum_hom(ObHandle y, ObHandle x, const Budget& b) const override {
    return base_->enum_hom(y, x, b);
  }
  std::vector<MorHandle> do_enum_sections(ObHandle x, const Budget& b,
                                          bool* truncated) const override;

 private:
  MorHandle next_parallel(MorHandle m) const;

  CSystemPtr base_;
  Target target_;
};

/// Instance factory for the config schema
/// {"kind":"unit"} | {"kind":"context","base_sizes":[..]} |
/// {"kind":"universe","els":[..]} |
/// {"kind":"mutated","base":{..},"mutation":"permute_q"|...}.
CSystemPtr make_instance(const nlohmann::json& config);

}  // namespace csys
