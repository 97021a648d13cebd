#include "unbeat/sim.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "unbeat/errors.hpp"

namespace unbeat {

namespace {

constexpr std::array<std::pair<TaskKind, std::string_view>, 5> kTaskNames{{
    {TaskKind::Consensus, "consensus"},
    {TaskKind::MajorityConsensus, "majority-consensus"},
    {TaskKind::KSet, "k-set"},
    {TaskKind::UniformConsensus, "uniform-consensus"},
    {TaskKind::UniformKSet, "uniform-k-set"},
}};

std::string ids(const std::vector<int>& ps) {
  std::string out;
  for (int p : ps) out += (out.empty() ? "" : ",") + std::to_string(p + 1);
  return out;
}

}  // namespace

std::string_view task_name(TaskKind kind) {
  for (const auto& [k, name] : kTaskNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<TaskKind> parse_task(std::string_view name) {
  for (const auto& [k, n] : kTaskNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void TaskSpec::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidTask, "k must be at least 1");
  if (value_count < 2) throw Error(ErrorCode::InvalidTask, "at least two values required");
  const bool set_task = kind == TaskKind::KSet || kind == TaskKind::UniformKSet;
  if (!set_task && k != 1) throw Error(ErrorCode::InvalidTask, "k must be 1 for consensus tasks");
  if (set_task && value_count < k + 1) throw Error(ErrorCode::InvalidTask, "k-set needs at least k+1 values");
  if (kind == TaskKind::MajorityConsensus && value_count != 2) {
    throw Error(ErrorCode::NonBinaryTask, "majority consensus is binary");
  }
}

RunVerdict check_run(const TaskSpec& task, const Adversary& adv, const DecisionSchedule& sched) {
  if (sched.horizon < adv.pattern.t + 1) {
    throw Error(ErrorCode::HorizonTooShort, "horizon " + std::to_string(sched.horizon) + " < t+1");
  }
  RunVerdict out;
  const Mask correct = adv.correct();
  const Mask relevant = task.uniform() ? all_processes(adv.n) : correct;

  std::vector<int> undecided;
  for (int j = 0; j < adv.n; ++j) {
    if (has(correct, j) && !sched.decisions[static_cast<std::size_t>(j)]) undecided.push_back(j);
  }
  if (!undecided.empty()) {
    out.decision = false;
    out.failures.push_back({"decision", "correct processes " + ids(undecided) + " never decide", undecided});
  }

  Mask decided_values = 0;
  std::vector<int> deciders;
  for (int j = 0; j < adv.n; ++j) {
    const auto& d = sched.decisions[static_cast<std::size_t>(j)];
    if (d && has(relevant, j)) {
      decided_values |= bit(d->value);
      deciders.push_back(j);
    }
  }
  if (popcount(decided_values) > task.agreement_bound()) {
    out.agreement = false;
    std::string detail = "processes " + ids(deciders) + " decide";
    for (int j : deciders) {
      const auto& d = *sched.decisions[static_cast<std::size_t>(j)];
      detail += " " + std::to_string(j + 1) + ":" + std::to_string(d.value) + "@" + std::to_string(d.time);
    }
    out.failures.push_back({"agreement", detail, deciders});
  }

  Mask initial = 0;
  for (Value v : adv.values) initial |= bit(v);
  std::vector<int> invalid;
  for (int j = 0; j < adv.n; ++j) {
    const auto& d = sched.decisions[static_cast<std::size_t>(j)];
    if (d && !has(initial, d->value)) invalid.push_back(j);
  }
  if (!invalid.empty()) {
    out.validity = false;
    out.failures.push_back({"validity", "processes " + ids(invalid) + " decide a value nobody holds", invalid});
  }

  if (task.kind == TaskKind::MajorityConsensus) {
    for (Value v : {0, 1}) {
      int support = 0;
      for (int j = 0; j < adv.n; ++j) {
        if (has(correct, j) && adv.values[static_cast<std::size_t>(j)] == v) ++support;
      }
      if (2 * support <= adv.n) continue;
      std::vector<int> wrong;
      for (int j = 0; j < adv.n; ++j) {
        const auto& d = sched.decisions[static_cast<std::size_t>(j)];
        if (d && d->value != v) wrong.push_back(j);
      }
      if (!wrong.empty()) {
        out.validity = false;
        out.failures.push_back({"majority-validity",
                                "correct majority holds " + std::to_string(v) + " but processes " + ids(wrong) +
                                    " decide otherwise",
                                wrong});
      }
    }
  }
  return out;
}

int decision_bound(const ProtocolSpec& spec, int f) {
  const int t = spec.t;
  const int k = spec.k_or_1();
  switch (spec.id) {
    case ProtocolId::OptMinK:
      return f / k + 1;
    case ProtocolId::UOpt0:
      return f >= t - 1 ? f + 1 : f + 2;
    case ProtocolId::UProtMinK:
      if (f == t - 1 && (t - 1) % k == 0) return f / k + 1;
      return std::min(t / k + 1, f / k + 2);
    default:
      return t + 1;
  }
}

bool check_bounds(const TaskSpec&, const ProtocolSpec& spec, const Adversary& adv, const DecisionSchedule& sched) {
  const int bound = decision_bound(spec, adv.failures());
  const Mask correct = adv.correct();
  for (int j = 0; j < adv.n; ++j) {
    const auto& d = sched.decisions[static_cast<std::size_t>(j)];
    if (d ? d->time > bound : has(correct, j)) return false;
  }
  return true;
}

}  // namespace unbeat
