#pragma once

// Exhaustive sweeps of one protocol (task and bound checks) or of a pair of
// protocols (schedule equality) over an enumerated domain.

#include <cstdint>
#include <optional>

#include "unbeat/domain.hpp"
#include "unbeat/protocols.hpp"
#include "unbeat/sim.hpp"

namespace unbeat {

struct VerifySweep {
  ProtocolSpec protocol;
  TaskSpec task;
  EnumerationDomain domain;
  std::uint64_t adversaries = 0;
  std::uint64_t failures = 0;
  std::uint64_t bound_violations = 0;
  int max_decision_time = -1;
  /// First offending adversary index in enumeration order.
  std::optional<std::uint64_t> first_failure;
  std::optional<std::uint64_t> first_bound_violation;

  bool pass() const { return failures == 0 && bound_violations == 0; }
};

/// check_run and check_bounds on every adversary of the domain.
VerifySweep verify_sweep(const ProtocolSpec& spec, const TaskSpec& task, const EnumerationDomain& dom, int workers = 1);

struct ScheduleAgreement {
  ProtocolSpec a;
  ProtocolSpec b;
  EnumerationDomain domain;
  std::uint64_t adversaries = 0;
  std::uint64_t mismatches = 0;
  std::optional<std::uint64_t> first_mismatch;

  bool pass() const { return mismatches == 0; }
};

/// Counts adversaries on which the two schedules differ.
ScheduleAgreement same_schedules(const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom,
                                 int workers = 1);

}  // namespace unbeat
