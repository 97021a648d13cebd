#pragma once

// Brute-force knowledge: a fact is known at a view iff it holds in every
// adversary of the domain that yields the same view.

#include <cstdint>
#include <string>
#include <vector>

#include "unbeat/domain.hpp"
#include "unbeat/model.hpp"

namespace unbeat {

enum class FactKind { Exists, ExistsCorrect, ExistsCorrectEventually, NeverKnown, Maj };

struct FactId {
  FactKind kind = FactKind::Exists;
  Value v = 0;

  std::string label() const;
  bool operator==(const FactId&) const = default;
};

/// EXISTS_CORRECT is evaluated at time m; the eventual variant and
/// NEVER_KNOWN at max(m, last crash round + 1), after which the known values
/// of correct processes are final.
bool eval_fact(const Adversary& adv, int m, FactId fact);

/// All adversaries of the domain in which the owner has exactly this view.
/// Throws Error{DomainTooLarge}.
std::vector<Adversary> indistinguishable(const EnumerationDomain& dom, const View& view);

bool knows(const EnumerationDomain& dom, const View& view, FactId fact);

/// One row of the agreement matrix: a combinatorial predicate against the
/// semantic knowledge of a fact, over every reachable view of the domain.
struct OracleRow {
  std::string predicate;
  std::string fact;
  std::uint64_t views = 0;
  std::uint64_t disagreements = 0;
  /// First disagreement in enumeration order: adversary index, owner, time.
  std::uint64_t example_index = 0;
  int example_owner = -1;
  int example_time = -1;
  bool combinatorial_value = false;
  /// Rows that document a reading rather than assert an equivalence.
  bool diagnostic = false;
};

struct OracleSweep {
  EnumerationDomain domain;
  std::uint64_t adversaries = 0;
  std::uint64_t distinct_views = 0;
  std::vector<OracleRow> rows;

  bool pass(bool include_diagnostic = false) const;
};

/// Rows: K∃v vs EXISTS(v); knows_exists_correct vs EXISTS_CORRECT(v) (and,
/// as a diagnostic, vs the eventual variant); K(Maj=v) vs MAJ(v) for binary
/// domains; ¬K∃0 ∧ ¬hidden path vs NEVER_KNOWN(0).
OracleSweep oracle_sweep(const EnumerationDomain& dom, int workers);

/// Processes chosen as i_b^l (row l, column b): the c lowest hidden ids per level.
std::vector<std::vector<int>> hidden_witnesses(const View& view, int c);

/// Reassigns the hidden witnesses of <i,m> so that witness b carries
/// values[b] up an invisible chain. Requires i active at m. Throws
/// Error{CapacityTooSmall} when |values| exceeds the capacity and
/// Error{CrashBudget} if the result would exceed t crashes.
Adversary hidden_variant(const Adversary& adv, int i, int m, const std::vector<Value>& values);

struct HiddenVariantCheck {
  bool view_preserved = false;
  bool values_planted = false;   // v_b known at <i_b^l, l>
  bool others_known = false;     // the rest is known to <i,l>
  bool witness_capacity = false; // <i_b^l, l> has capacity >= c-1
  bool valid = false;

  bool pass() const { return view_preserved && values_planted && others_known && witness_capacity && valid; }
};

HiddenVariantCheck check_hidden_variant(const Adversary& adv, const Adversary& variant, int i, int m,
                                        const std::vector<Value>& values, int value_count);

struct HiddenVariantSweep {
  EnumerationDomain domain;
  std::uint64_t adversaries = 0;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  /// First failure in enumeration order.
  std::uint64_t example_index = 0;
  int example_owner = -1;
  int example_time = -1;

  bool pass() const { return failures == 0 && cases > 0; }
};

/// Every (adversary, i, m) with capacity c >= 1: plants c values rotated by
/// the adversary index, then a single value, and checks both variants.
HiddenVariantSweep hidden_variant_sweep(const EnumerationDomain& dom, int workers);

}  // namespace unbeat
