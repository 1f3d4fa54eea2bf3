#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csys {

/// Interned object identifier. `length` caches the value of the length
/// function l at this object; it is fixed for the lifetime of the handle.
struct ObHandle {
  std::uint32_t id = 0;
  std::uint32_t length = 0;

  friend bool operator==(const ObHandle& a, const ObHandle& b) { return a.id == b.id; }
  friend bool operator!=(const ObHandle& a, const ObHandle& b) { return a.id != b.id; }
  friend bool operator<(const ObHandle& a, const ObHandle& b) { return a.id < b.id; }
};

/// Interned morphism identifier with cached endpoints. Composition is
/// written diagrammatically throughout: compose(f, g) is "f then g".
struct MorHandle {
  std::uint32_t id = 0;
  ObHandle src;
  ObHandle tgt;

  friend bool operator==(const MorHandle& a, const MorHandle& b) { return a.id == b.id; }
  friend bool operator!=(const MorHandle& a, const MorHandle& b) { return a.id != b.id; }
  friend bool operator<(const MorHandle& a, const MorHandle& b) { return a.id < b.id; }
};

/// An element of the tilde-Ob set: a morphism s: ft(X) -> X with
/// s . p_X = Id_{ft(X)}. Target length is positive.
struct Section {
  MorHandle mor;

  ObHandle target() const { return mor.tgt; }

  friend bool operator==(const Section& a, const Section& b) { return a.mor == b.mor; }
  friend bool operator!=(const Section& a, const Section& b) { return a.mor != b.mor; }
  friend bool operator<(const Section& a, const Section& b) { return a.mor < b.mor; }
};

/// Enumeration budget. Fragments are bounded by object length, a cap on
/// point-set size, a cap on hom-set size and a cap on quantified pairs;
/// anything beyond a cap is deterministically sampled and flagged.
struct Budget {
  std::uint32_t max_len = 3;
  std::uint64_t point_cap = 8;
  std::uint64_t hom_cap = 4096;
  std::uint64_t pair_cap = 1u << 20;
  std::uint64_t rng_seed = 0;
};

struct HomSet {
  std::vector<MorHandle> mors;
  bool truncated = false;
};

enum class CheckStatus { Pass, Fail, Skipped };

struct Counterexample {
  std::string input;
  std::string expected;
  std::string actual;
};

/// Result of a single named check. `status == Fail` iff counterexamples is
/// nonempty; `Skipped` means coverage was reduced by a budget cap (never a
/// silent pass).
struct CheckReport {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::vector<Counterexample> counterexamples;
  std::uint64_t cases = 0;
  std::uint64_t skipped_cases = 0;

  /// At most the first 64 counterexamples are stored (in deterministic
  /// quantification order); the status always reflects every violation.
  static constexpr std::size_t kMaxStoredCounterexamples = 64;

  void add_counterexample(std::string input, std::string expected, std::string actual) {
    status = CheckStatus::Fail;
    if (!counterexamples_full())
      counterexamples.push_back({std::move(input), std::move(expected), std::move(actual)});
  }
  /// Callers in hot loops may use this to skip building the description
  /// strings once the stored list is full; pair with note_failure().
  bool counterexamples_full() const {
    return counterexamples.size() >= kMaxStoredCounterexamples;
  }
  void note_failure() { status = CheckStatus::Fail; }
  void finish() {
    if (status == CheckStatus::Fail) return;
    status = skipped_cases > 0 ? CheckStatus::Skipped : CheckStatus::Pass;
  }
};

/// Precondition violation of a partial operation; side conditions of the
/// structural operations are checked and raise this.
struct domain_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A table-backed instance was asked for data outside its window.
struct window_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The instance does not support the requested facility (e.g. points()
/// on the unit instance).
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* to_string(CheckStatus s);

}  // namespace csys
