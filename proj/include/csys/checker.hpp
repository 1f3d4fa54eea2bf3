#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csys/congruence.hpp"
#include "csys/fragment.hpp"
#include "csys/subsystems.hpp"

namespace csys {

/// Named bundle of check results. Execution is deterministic given the
/// instance config and the budget, so reports are reproducible byte for
/// byte once serialized.
struct SuiteReport {
  std::string suite;
  std::vector<CheckReport> checks;

  std::size_t passed() const;
  std::size_t failed() const;
  std::size_t skipped() const;
  /// No failed check (skipped checks do not count against ok).
  bool ok() const { return failed() == 0; }
};

nlohmann::json suite_report_to_json(const SuiteReport& sr);
std::string suite_report_to_text(const SuiteReport& sr);

/// Structural axioms: the seven base conditions plus the four section
/// conditions, quantified over the fragment.
SuiteReport suite_c0_c(CSystemPtr cs, const Fragment& frag);

/// Canonical squares are pullbacks: existence and uniqueness of fillers,
/// agreement of the scanned filler with the solved one, and agreement of
/// the pullback-reconstructed section operation with the instance's own.
SuiteReport suite_prop_pullback(CSystemPtr cs, const Fragment& frag);

/// Windowed subsystem pipeline: close the seed, verify the closure
/// conditions, the five lemma properties, and determination against the
/// window re-closed from its own contents.
SuiteReport suite_subsystem(CSystemPtr cs, const SubsystemSeed& seed, std::uint32_t L,
                            const Fragment& frag);

/// Windowed congruence pipeline: close the seed, verify the presentation
/// and definition conditions, sweep the projection-section identity, build
/// the quotient, re-check the axioms on the quotient one level down, and
/// verify section classes and both round trips.
SuiteReport suite_congruence(CSystemPtr cs, const RelationSeed& seed, const Fragment& frag);

/// A shipped desk-scale configuration: instance config plus budget.
struct Fixture {
  std::string name;
  nlohmann::json instance_config;
  Budget budget;
};

/// The four shipped fixtures, each completing in seconds while exercising
/// every operation with nontrivial dependency.
std::vector<Fixture> fixtures();

/// Deterministic seed battery for the subsystem pipeline (at least five).
std::vector<SubsystemSeed> default_subsystem_seeds(const CSystem& cs, const Fragment& frag);

/// The relation identifying all fragment objects of equal length and all
/// fragment sections with equal target length and equal underlying table.
/// On product-style instances this is the kernel of collapsing the base
/// data, so its quotient matches the smaller instance.
RelationSeed collapse_kernel_seed(const CSystem& cs, const Fragment& frag);

/// Relation seeds run per fixture: always the discrete relation, plus the
/// collapse kernel whenever it identifies anything.
std::vector<RelationSeed> default_relation_seeds(const CSystem& cs, const Fragment& frag);

/// Optional per-field budget overrides applied on top of each fixture's
/// shipped budget.
struct BudgetOverrides {
  std::optional<std::uint32_t> max_len;
  std::optional<std::uint64_t> point_cap;
  std::optional<std::uint64_t> hom_cap;
  std::optional<std::uint64_t> rng_seed;

  Budget apply(Budget b) const;
};

/// Every suite of a single fixture, in deterministic order.
std::vector<SuiteReport> run_fixture_suites(const Fixture& f);

/// Every suite of every shipped fixture; the acceptance entry point.
std::vector<SuiteReport> run_all_suites(const BudgetOverrides& o = {});

bool all_ok(const std::vector<SuiteReport>& suites);
nlohmann::json suites_to_json(const std::vector<SuiteReport>& suites);
std::string suites_to_text(const std::vector<SuiteReport>& suites);

}  // namespace csys
