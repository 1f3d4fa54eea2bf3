#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "csys/csystem.hpp"
#include "csys/fragment.hpp"

namespace csys {

/// ft on morphisms: f . p_X for f : Y -> X. Undefined at pt-targets.
MorHandle ft_mor(const CSystem& cs, MorHandle f);

/// Iterated canonical projection p_{X,i} : X -> ft^i(X); requires l(X) >= i.
MorHandle proj_iter(const CSystem& cs, ObHandle x, std::uint32_t i);

ObHandle ft_iter(const CSystem& cs, ObHandle x, std::uint32_t i);

/// Iterated base change f^*(X, i) and q(f, X, i) for f : Y -> ft^i(X).
ObHandle star_iter(const CSystem& cs, MorHandle f, ObHandle x, std::uint32_t i);
MorHandle q_iter(const CSystem& cs, MorHandle f, ObHandle x, std::uint32_t i);

/// Pullback f^*(s, i) of the section s : ft(X) -> X along q(f, ft(X), i-1);
/// the unique section of p_{f^*(X,i)} composing with q(f, X, i) to
/// q(f, ft(X), i-1) . s. Requires i >= 1 and l(X) >= i.
Section sect_pull(const CSystem& cs, MorHandle f, const Section& s, std::uint32_t i);

/// The unique 1 <= i <= l(X) with ft^i(X) = ft(Y), when it exists.
std::optional<std::uint32_t> level_offset(const CSystem& cs, ObHandle y, ObHandle x);

// The eight operations on (Ob, tilde-Ob). T/T-tilde are weakening along a
// canonical projection, S/S-tilde are substitution along a section, delta
// is the diagonal section s_{Id_X}.
ObHandle op_pt(const CSystem& cs);
ObHandle op_ft(const CSystem& cs, ObHandle x);
ObHandle op_partial(const Section& s);
ObHandle op_T(const CSystem& cs, ObHandle y, ObHandle x);
Section op_Tt(const CSystem& cs, ObHandle y, const Section& r);
ObHandle op_S(const CSystem& cs, const Section& s, ObHandle x);
Section op_St(const CSystem& cs, const Section& s, const Section& r);
Section op_delta(const CSystem& cs, ObHandle x);

/// The unique filler g : Z -> f^*X with ft_mor(g) = g1 and g . q(f,X) = g2,
/// computed as s_{g2} . q(g1, f^*X). Requires g1 . f = ft_mor(g2).
MorHandle solve_pullback(const CSystem& cs, MorHandle g1, MorHandle g2, MorHandle f,
                         ObHandle x);

/// The seven C0-system conditions, verified over the fragment. One report
/// per condition.
std::vector<CheckReport> check_c0_axioms(const CSystem& cs, const Fragment& frag);

/// The four conditions defining the section operation s_f.
std::vector<CheckReport> check_s_axioms(const CSystem& cs, const Fragment& frag);

/// Existence and uniqueness of fillers for the canonical square of (f, X),
/// for every cone from every fragment object; uniqueness by exhaustive scan
/// of Mor(Z, f^*X), existence cross-checked against solve_pullback. Budget
/// exhaustion is reported as skipped cases, never as a pass.
CheckReport check_pullback_universal(const CSystem& cs, MorHandle f, ObHandle x,
                                     const Fragment& frag);

/// s_f reconstructed from the pullback property of the canonical square of
/// (ft_mor(f), X) equals the instance's s_f, for every fragment morphism.
CheckReport check_sf_from_pullback(const CSystem& cs, const Fragment& frag);

namespace detail {

/// Deterministic pair iteration: visits all (i, j) in [0,n) x [0,m) when
/// n*m <= budget.pair_cap, otherwise a seeded sample of pair_cap pairs.
/// Returns true when sampling occurred.
bool for_pairs(std::uint64_t n, std::uint64_t m, const Budget& budget, std::uint64_t seed_tag,
               const std::function<void(std::uint64_t, std::uint64_t)>& fn);

}  // namespace detail

}  // namespace csys
