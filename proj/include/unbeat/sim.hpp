#pragma once

// Task properties evaluated on decision schedules.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unbeat/model.hpp"
#include "unbeat/protocols.hpp"

namespace unbeat {

enum class TaskKind { Consensus, MajorityConsensus, KSet, UniformConsensus, UniformKSet };

std::string_view task_name(TaskKind kind);
std::optional<TaskKind> parse_task(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::Consensus;
  int k = 1;
  int value_count = 2;

  /// Throws Error{InvalidTask}.
  void validate() const;
  bool uniform() const { return kind == TaskKind::UniformConsensus || kind == TaskKind::UniformKSet; }
  /// Number of distinct decision values allowed.
  int agreement_bound() const {
    return kind == TaskKind::KSet || kind == TaskKind::UniformKSet ? k : 1;
  }
  bool operator==(const TaskSpec&) const = default;
};

struct PropertyFailure {
  std::string property;  // "decision", "agreement", "validity", "majority-validity"
  std::string detail;
  std::vector<int> processes;  // 0-based

  bool operator==(const PropertyFailure&) const = default;
};

struct RunVerdict {
  bool decision = true;
  bool agreement = true;
  bool validity = true;
  std::vector<PropertyFailure> failures;

  bool pass() const { return failures.empty(); }
};

/// Throws Error{HorizonTooShort} when sched.horizon < t+1.
RunVerdict check_run(const TaskSpec& task, const Adversary& adv, const DecisionSchedule& sched);

/// Latest decision time the protocol's stopping bound allows for a run with f crashes.
int decision_bound(const ProtocolSpec& spec, int f);

bool check_bounds(const TaskSpec& task, const ProtocolSpec& spec, const Adversary& adv,
                  const DecisionSchedule& sched);

}  // namespace unbeat
