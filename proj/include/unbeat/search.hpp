#pragma once

// Protocol comparison over an enumerated adversary space, and an exact search
// for decision tables that strictly dominate a given protocol.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unbeat/domain.hpp"
#include "unbeat/model.hpp"
#include "unbeat/protocols.hpp"
#include "unbeat/sim.hpp"

namespace unbeat {

/// Label of compare(a, b). Dominates means each dominates the other (equal
/// wherever both decide); StrictlyDominates means a dominates b but not back.
enum class Relation { Dominates, StrictlyDominates, Incomparable, Dominated };

std::string_view relation_name(Relation r);

/// Whose decisions count towards the last decision of a run.
enum class LastDeciderScope { Correct, All };

std::string_view scope_name(LastDeciderScope s);
std::optional<LastDeciderScope> parse_scope(std::string_view name);

/// One adversary on which the two protocols differ. `process` is -1 for
/// last-decider comparisons; a missing time means "never".
struct DominationWitness {
  std::uint64_t index = 0;
  Adversary adversary;
  int process = -1;
  std::optional<int> time_a;
  std::optional<int> time_b;

  bool operator==(const DominationWitness&) const = default;
};

struct DominationReport {
  Relation relation = Relation::Dominates;
  std::uint64_t adversaries = 0;
  std::uint64_t earlier = 0;  // comparisons where a is strictly earlier
  std::uint64_t later = 0;    // comparisons where b is strictly earlier
  std::vector<DominationWitness> witnesses;  // a earlier, first few in index order
  std::vector<DominationWitness> reverse;    // b earlier, first few in index order

  bool operator==(const DominationReport&) const = default;
};

inline constexpr std::size_t kMaxWitnesses = 4;

/// Fills `out` with the decision schedule of one run. Must be callable from
/// several threads at once.
using ScheduleFn = std::function<void(const Adversary&, int horizon, DecisionSchedule& out)>;

ScheduleFn schedule_fn(const ProtocolSpec& spec);

DominationReport compare(const ScheduleFn& a, const ScheduleFn& b, const EnumerationDomain& dom,
                         int workers = 1);
DominationReport compare(const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom,
                         int workers = 1);

/// Compares per-adversary last decision times. An undecided correct process
/// makes the last decision time infinite.
DominationReport compare_last_decider(const ScheduleFn& a, const ScheduleFn& b, const EnumerationDomain& dom,
                                      LastDeciderScope scope = LastDeciderScope::Correct, int workers = 1);
DominationReport compare_last_decider(const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom,
                                      LastDeciderScope scope = LastDeciderScope::Correct, int workers = 1);

/// Decisions of a full-information protocol keyed by view fingerprint. Only
/// first-decision views are stored; all other views map to "undecided".
struct ProtocolTable {
  std::map<std::string, Value> decision;

  std::optional<Value> lookup(const View& view) const;
  DecisionRule rule() const;
  ScheduleFn schedule() const;
  DecisionSchedule run(const Adversary& adv, int horizon) const;
};

enum class SearchMode { PerProcess, LastDecider };

std::string_view mode_name(SearchMode m);
std::optional<SearchMode> parse_mode(std::string_view name);

struct SearchOptions {
  SearchMode mode = SearchMode::PerProcess;
  LastDeciderScope scope = LastDeciderScope::Correct;
  std::uint64_t budget = 100000000;  // solver conflicts
  bool guard = true;                 // n <= 3, t <= 1, |V| = 2, horizon = t+1
  int workers = 1;                   // used by verification sweeps only
};

/// Size of the searched space and the solver effort. With no witness this is
/// the certificate that no table in the space qualifies.
struct SearchStats {
  std::uint64_t adversaries = 0;
  std::size_t views = 0;
  std::size_t target_decision_views = 0;
  std::size_t variables = 0;
  std::size_t clauses = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
};

struct AuditEntry {
  ProtocolSpec protocol;
  bool solves = false;
  Relation relation = Relation::Incomparable;
};

struct SearchResult {
  SearchMode mode = SearchMode::PerProcess;
  LastDeciderScope scope = LastDeciderScope::Correct;
  std::optional<ProtocolTable> witness;
  std::optional<DominationReport> witness_report;  // witness vs target, selected mode
  SearchStats stats;
  bool target_solves = false;
  bool target_decides_by_horizon = false;
  std::vector<AuditEntry> audit;  // filled when no witness exists

  bool beatable() const { return witness.has_value(); }
};

/// Exhaustive search over all decision tables on the views of `dom` for one
/// that solves `task` and strictly dominates `target` in the selected mode.
/// Throws Error{DomainTooLarge} beyond the guard and
/// Error{SearchBudgetExceeded} when the solver gives up.
SearchResult beat_search(const ProtocolSpec& target, const TaskSpec& task, const EnumerationDomain& dom,
                         const SearchOptions& options = {});

}  // namespace unbeat
