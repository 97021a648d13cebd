#include "unbeat/sweep.hpp"

#include <algorithm>
#include <vector>

namespace unbeat {

namespace {

constexpr std::uint64_t kChunk = 512;

void keep_first(std::optional<std::uint64_t>& into, const std::optional<std::uint64_t>& from) {
  if (!into && from) into = from;
}

}  // namespace

VerifySweep verify_sweep(const ProtocolSpec& spec, const TaskSpec& task, const EnumerationDomain& dom, int workers) {
  spec.validate();
  task.validate();
  AdversarySpace space(dom);
  std::vector<VerifySweep> partial(chunk_count(space.size(), kChunk));
  parallel_chunks(space.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    VerifySweep& local = partial[chunk];
    Simulator sim;
    Adversary a;
    DecisionSchedule sched;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      space.at_into(idx, a);
      sim.run(spec, a, dom.horizon, sched);
      if (!check_run(task, a, sched).pass() && local.failures++ == 0) local.first_failure = idx;
      if (!check_bounds(task, spec, a, sched) && local.bound_violations++ == 0) local.first_bound_violation = idx;
      for (const auto& d : sched.decisions) {
        if (d) local.max_decision_time = std::max(local.max_decision_time, d->time);
      }
    }
  });
  VerifySweep out;
  out.protocol = spec;
  out.task = task;
  out.domain = dom;
  out.adversaries = space.size();
  for (const auto& p : partial) {
    out.failures += p.failures;
    out.bound_violations += p.bound_violations;
    out.max_decision_time = std::max(out.max_decision_time, p.max_decision_time);
    keep_first(out.first_failure, p.first_failure);
    keep_first(out.first_bound_violation, p.first_bound_violation);
  }
  return out;
}

ScheduleAgreement same_schedules(const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom,
                                 int workers) {
  a.validate();
  b.validate();
  AdversarySpace space(dom);
  std::vector<ScheduleAgreement> partial(chunk_count(space.size(), kChunk));
  parallel_chunks(space.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    ScheduleAgreement& local = partial[chunk];
    Simulator sim;
    Adversary adv;
    DecisionSchedule sa;
    DecisionSchedule sb;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      space.at_into(idx, adv);
      sim.run(a, adv, dom.horizon, sa);
      sim.run(b, adv, dom.horizon, sb);
      if (sa != sb && local.mismatches++ == 0) local.first_mismatch = idx;
    }
  });
  ScheduleAgreement out;
  out.a = a;
  out.b = b;
  out.domain = dom;
  out.adversaries = space.size();
  for (const auto& p : partial) {
    out.mismatches += p.mismatches;
    keep_first(out.first_mismatch, p.first_mismatch);
  }
  return out;
}

}  // namespace unbeat
