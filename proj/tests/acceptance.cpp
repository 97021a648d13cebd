// Acceptance run: one PASS/FAIL line per criterion, preceded by indented
// evidence lines. Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "unbeat/codec.hpp"
#include "unbeat/errors.hpp"
#include "unbeat/io.hpp"
#include "unbeat/oracle.hpp"
#include "unbeat/search.hpp"
#include "unbeat/sweep.hpp"

using namespace unbeat;

namespace {

const int kWorkers = default_workers();

ProtocolSpec spec(ProtocolId id, int n, int t, int values = 2, std::optional<int> k = std::nullopt) {
  return {id, k, values, t, n};
}

std::string dom_str(const EnumerationDomain& d) {
  return "n=" + std::to_string(d.n) + " t=" + std::to_string(d.t) + " |V|=" + std::to_string(d.value_count) +
         " H=" + std::to_string(d.horizon);
}

void detail(const std::string& line) { std::printf("  %s\n", line.c_str()); }

class Criterion {
 public:
  Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {
    std::printf("criterion %d: %s\n", number_, title_.c_str());
    std::fflush(stdout);
    start_ = std::chrono::steady_clock::now();
  }

  /// Records one sub-check and prints its evidence line.
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    detail(std::string(ok ? "ok   " : "FAIL ") + what);
    std::fflush(stdout);
  }

  bool finish() const {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("criterion %d: %s (%s, %.1fs)\n", number_, ok_ ? "PASS" : "FAIL", title_.c_str(), s);
    std::fflush(stdout);
    return ok_;
  }

 private:
  int number_;
  std::string title_;
  bool ok_ = true;
  std::chrono::steady_clock::time_point start_;
};

struct SweepCase {
  ProtocolSpec protocol;
  TaskSpec task;
  EnumerationDomain domain;
  bool own_bound = false;  // protocol has a stopping bound tighter than t+1
};

std::vector<SweepCase> sweep_cases() {
  std::vector<SweepCase> out;
  for (int t = 0; t <= 2; ++t) {
    const auto dom = EnumerationDomain::standard(3, t, 2);
    const TaskSpec consensus{TaskKind::Consensus, 1, 2};
    for (ProtocolId id : {ProtocolId::Opt0, ProtocolId::Opt1, ProtocolId::P0, ProtocolId::P0OptHmw}) {
      out.push_back({spec(id, 3, t), consensus, dom});
    }
    if (t >= 1) out.push_back({spec(ProtocolId::OptMaj, 3, t), {TaskKind::MajorityConsensus, 1, 2}, dom});
    out.push_back({spec(ProtocolId::UP0, 3, t), {TaskKind::UniformConsensus, 1, 2}, dom});
    out.push_back({spec(ProtocolId::UOpt0, 3, t), {TaskKind::UniformConsensus, 1, 2}, dom, true});
  }
  for (int t = 1; t <= 3; ++t) {
    const auto dom = EnumerationDomain::standard(4, t, 3);
    out.push_back({spec(ProtocolId::OptMinK, 4, t, 3, 2), {TaskKind::KSet, 2, 3}, dom, true});
    out.push_back({spec(ProtocolId::UProtMinK, 4, t, 3, 2), {TaskKind::UniformKSet, 2, 3}, dom, true});
  }
  return out;
}

std::string witness_str(const DominationReport& r) {
  if (r.witnesses.empty()) return "no witness";
  const auto& w = r.witnesses.front();
  std::string s = to_json(w.adversary).dump();
  s += w.process >= 0 ? " process " + std::to_string(w.process + 1) : " last decider";
  s += " a@" + (w.time_a ? std::to_string(*w.time_a) : std::string("never"));
  s += " b@" + (w.time_b ? std::to_string(*w.time_b) : std::string("never"));
  return s;
}

bool correctness_and_bounds() {
  Criterion c1(1, "correctness sweeps");
  std::vector<VerifySweep> sweeps;
  std::uint64_t runs = 0;
  for (const auto& sc : sweep_cases()) {
    auto s = verify_sweep(sc.protocol, sc.task, sc.domain, kWorkers);
    runs += s.adversaries;
    c1.check(s.failures == 0, sc.protocol.label() + " solves " + std::string(task_name(sc.task.kind)) + " on " +
                                  dom_str(sc.domain) + ": " + std::to_string(s.adversaries) + " runs, " +
                                  std::to_string(s.failures) + " failures");
    sweeps.push_back(s);
  }
  detail(std::to_string(runs) + " runs in total");
  const bool pass1 = c1.finish();

  Criterion c2(2, "stopping-time bounds");
  const auto cases = sweep_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (!cases[i].own_bound) continue;
    const auto& s = sweeps[i];
    std::string bounds;
    for (int f = 0; f <= s.domain.t; ++f) {
      bounds += (f ? "," : "") + std::to_string(decision_bound(s.protocol, f));
    }
    c2.check(s.bound_violations == 0, s.protocol.label() + " on " + dom_str(s.domain) + ": bound by f=0.. [" + bounds +
                                          "], " + std::to_string(s.bound_violations) + " violations, latest decision " +
                                          std::to_string(s.max_decision_time));
  }
  return c2.finish() && pass1;
}

bool domination() {
  Criterion c(3, "domination facts");
  auto expect = [&](ProtocolId a, ProtocolId b, int n, int t, Relation want) {
    const auto dom = EnumerationDomain::standard(n, t, 2);
    auto r = compare(spec(a, n, t), spec(b, n, t), dom, kWorkers);
    bool ok = r.relation == want;
    if (want == Relation::StrictlyDominates) ok = ok && !r.witnesses.empty();
    if (want == Relation::Incomparable) ok = ok && !r.witnesses.empty() && !r.reverse.empty();
    c.check(ok, std::string(protocol_name(a)) + " vs " + std::string(protocol_name(b)) + " on " + dom_str(dom) + ": " +
                    std::string(relation_name(r.relation)) + " (a earlier on " + std::to_string(r.earlier) +
                    ", b earlier on " + std::to_string(r.later) + "); witness " + witness_str(r));
  };
  expect(ProtocolId::Opt0, ProtocolId::P0, 3, 1, Relation::StrictlyDominates);
  expect(ProtocolId::Opt0, ProtocolId::P0, 3, 2, Relation::StrictlyDominates);
  expect(ProtocolId::Opt0, ProtocolId::P0OptHmw, 3, 2, Relation::StrictlyDominates);
  expect(ProtocolId::Opt0, ProtocolId::P0OptHmw, 4, 2, Relation::StrictlyDominates);
  expect(ProtocolId::Opt0, ProtocolId::Opt1, 3, 1, Relation::Incomparable);
  expect(ProtocolId::Opt0, ProtocolId::Opt1, 3, 2, Relation::Incomparable);

  int pairs = 0;
  int dominated = 0;
  int violations = 0;
  for (int t = 1; t <= 2; ++t) {
    const auto dom = EnumerationDomain::standard(3, t, 2);
    std::vector<ProtocolSpec> all;
    for (ProtocolId id : all_protocols()) {
      auto p = spec(id, 3, t);
      if (id == ProtocolId::OptMinK || id == ProtocolId::UProtMinK) p.k = 1;
      all.push_back(p);
    }
    for (const auto& a : all) {
      for (const auto& b : all) {
        if (a == b) continue;
        ++pairs;
        const Relation r = compare(a, b, dom, kWorkers).relation;
        if (r != Relation::Dominates && r != Relation::StrictlyDominates) continue;
        ++dominated;
        for (auto scope : {LastDeciderScope::Correct, LastDeciderScope::All}) {
          const Relation l = compare_last_decider(a, b, dom, scope, kWorkers).relation;
          if (l != Relation::Dominates && l != Relation::StrictlyDominates) {
            ++violations;
            detail("per-process domination without last-decider domination: " + a.label() + " over " + b.label() +
                   " on " + dom_str(dom) + " scope " + std::string(scope_name(scope)));
          }
        }
      }
    }
  }
  c.check(violations == 0, "per-process implies last-decider on " + std::to_string(pairs) + " ordered pairs (" +
                               std::to_string(dominated) + " dominating, both scopes): " +
                               std::to_string(violations) + " violations");
  return c.finish();
}

bool certificates() {
  Criterion c(4, "unbeatability certificates");
  auto run = [&](ProtocolId target, TaskKind task, int n, int t, SearchMode mode, bool want_beatable) {
    const auto dom = EnumerationDomain::standard(n, t, 2);
    SearchOptions options;
    options.mode = mode;
    options.workers = kWorkers;
    std::string what = std::string(protocol_name(target)) + " (" + std::string(task_name(task)) + ") at n=" +
                       std::to_string(n) + " t=" + std::to_string(t) + " " + std::string(mode_name(mode)) + ": ";
    try {
      auto r = beat_search(spec(target, n, t), {task, 1, 2}, dom, options);
      if (r.beatable()) {
        what += "witness table of " + std::to_string(r.witness->decision.size()) + " decision views, " +
                std::string(relation_name(r.witness_report->relation)) + " the target";
      } else {
        what += "no dominating protocol; full-space certificate over " + std::to_string(r.stats.views) +
                " views, " + std::to_string(r.stats.variables) + " variables, " + std::to_string(r.stats.clauses) +
                " clauses, solver unsatisfiable after " + std::to_string(r.stats.conflicts) + " conflicts";
      }
      c.check(r.beatable() == want_beatable, what);
    } catch (const Error& e) {
      c.check(false, what + "error " + std::string(to_string(e.code())) + ": " + e.what());
    }
  };
  for (auto mode : {SearchMode::PerProcess, SearchMode::LastDecider}) {
    run(ProtocolId::Opt0, TaskKind::Consensus, 2, 1, mode, false);
    run(ProtocolId::Opt0, TaskKind::Consensus, 3, 1, mode, false);
    run(ProtocolId::OptMaj, TaskKind::MajorityConsensus, 3, 1, mode, false);
    run(ProtocolId::P0, TaskKind::Consensus, 2, 1, mode, true);
    run(ProtocolId::P0, TaskKind::Consensus, 3, 1, mode, true);
    run(ProtocolId::P0OptHmw, TaskKind::Consensus, 2, 1, mode, true);
    run(ProtocolId::P0OptHmw, TaskKind::Consensus, 3, 1, mode, true);
  }
  // Evidence for the (3,1) outcome above: with one crash the two rules coincide.
  const auto dom = EnumerationDomain::standard(3, 1, 2);
  auto same = same_schedules(spec(ProtocolId::Opt0, 3, 1), spec(ProtocolId::P0OptHmw, 3, 1), dom, kWorkers);
  detail("note: p0opt-hmw and opt0 schedules differ on " + std::to_string(same.mismatches) + " of " +
         std::to_string(same.adversaries) + " adversaries at n=3 t=1, so any protocol beating p0opt-hmw there "
         "would beat opt0, which is certified unbeatable above");
  SearchOptions unguarded;
  unguarded.guard = false;
  unguarded.workers = kWorkers;
  auto wide = beat_search(spec(ProtocolId::P0OptHmw, 3, 2), {TaskKind::Consensus, 1, 2},
                          EnumerationDomain::standard(3, 2, 2), unguarded);
  detail(std::string("note: p0opt-hmw at n=3 t=2 (guard lifted) per-process: ") +
         (wide.beatable() ? "witness found" : "no witness"));
  return c.finish();
}

bool oracle() {
  Criterion c(5, "knowledge oracle agreement");
  std::uint64_t views = 0;
  for (int n = 2; n <= 3; ++n) {
    for (int t = 0; t <= std::min(2, n - 1); ++t) {
      for (int values = 2; values <= 3; ++values) {
        for (int h = t + 1; h <= 3; ++h) {
          const EnumerationDomain dom{n, t, values, h};
          auto s = oracle_sweep(dom, kWorkers);
          std::uint64_t disagreements = 0;
          std::string rows;
          for (const auto& r : s.rows) {
            if (r.diagnostic) continue;
            disagreements += r.disagreements;
            rows += (rows.empty() ? "" : ", ") + r.predicate + " " + std::to_string(r.disagreements);
          }
          views += s.distinct_views;
          c.check(s.pass(), dom_str(dom) + ": " + std::to_string(s.distinct_views) + " views; disagreements " + rows);
        }
      }
    }
  }
  detail(std::to_string(views) + " distinct views in total");
  return c.finish();
}

bool hidden_variants() {
  Criterion c(6, "hidden-variant construction");
  for (int n = 2; n <= 4; ++n) {
    for (int t = 1; t <= n - 1; ++t) {
      for (int values = 2; values <= 3; ++values) {
        if (n == 4 && t == 3 && values == 3) continue;
        const auto dom = EnumerationDomain::standard(n, t, values);
        auto s = hidden_variant_sweep(dom, kWorkers);
        std::string what = dom_str(dom) + ": " + std::to_string(s.cases) + " variants over " +
                           std::to_string(s.adversaries) + " adversaries, " + std::to_string(s.failures) + " failures";
        if (s.failures) {
          what += " (first at index " + std::to_string(s.example_index) + " process " +
                  std::to_string(s.example_owner + 1) + " time " + std::to_string(s.example_time) + ")";
        }
        c.check(s.pass(), what);
      }
    }
  }
  return c.finish();
}

bool coincidences() {
  Criterion c(7, "protocol coincidences");
  auto same = [&](const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom) {
    auto s = same_schedules(a, b, dom, kWorkers);
    c.check(s.pass(), a.label() + " == " + b.label() + " on " + dom_str(dom) + ": " + std::to_string(s.mismatches) +
                          " of " + std::to_string(s.adversaries) + " schedules differ");
  };
  for (int n = 3; n <= 4; ++n) {
    for (int t = 0; t <= 2; ++t) {
      for (int values = 2; values <= 3; ++values) {
        const auto dom = EnumerationDomain::standard(n, t, values);
        same(spec(ProtocolId::OptMinK, n, t, values, 1), spec(ProtocolId::OptMin, n, t, values), dom);
        if (values == 2) same(spec(ProtocolId::UProtMinK, n, t, 2, 1), spec(ProtocolId::UOpt0, n, t), dom);
      }
    }
  }
  for (int n = 2; n <= 4; ++n) {
    same(spec(ProtocolId::UOpt0, n, 0), spec(ProtocolId::Opt0, n, 0), EnumerationDomain::standard(n, 0, 2));
  }
  return c.finish();
}

bool codec() {
  Criterion c(8, "compact messaging");
  for (int n = 2; n <= 4; ++n) {
    for (int t = 0; t <= std::min(2, n - 1); ++t) {
      for (int values = 2; values <= 3; ++values) {
        const auto dom = EnumerationDomain::standard(n, t, values);
        auto s = codec_sweep(dom, codec_protocols(dom), kWorkers);
        c.check(s.pass(), dom_str(dom) + ": " + std::to_string(s.protocols.size()) + " protocols x " +
                              std::to_string(s.adversaries) + " adversaries, " +
                              std::to_string(s.schedule_mismatches) + " mismatches, max " +
                              std::to_string(s.max_pair_bits) + " bits per pair, reports per subject <= " +
                              std::to_string(s.max_value_reports) + " VALUE / " +
                              std::to_string(s.max_failed_reports) + " FAILED_AT");
      }
    }
  }
  for (int n : {8, 16, 32}) {
    auto b = bit_budget_check(n, 1000, 12345, kWorkers);
    c.check(b.pass(), "n=" + std::to_string(n) + ", " + std::to_string(b.samples) + " random adversaries: max " +
                          std::to_string(b.max_pair_bits) + " bits per pair <= " + std::to_string(kCodecConstant) +
                          "*n*log2(n) = " + std::to_string(static_cast<long long>(b.budget)));
  }
  return c.finish();
}

std::string cli_results(std::vector<std::string> args, const std::string& workers) {
  args.push_back("--workers");
  args.push_back(workers);
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  if (code == cli::kExitUsage) return "usage error: " + err.str();
  return std::to_string(code) + " " + Json::parse(out.str()).at("results").dump();
}

bool determinism() {
  Criterion c(9, "determinism");
  const std::vector<std::vector<std::string>> commands{
      {"verify", "--protocol", "opt-min-k", "--k", "2", "--task", "k-set", "--n", "4", "--t", "2", "--values", "3"},
      {"verify", "--protocol", "p0", "--task", "uniform-consensus", "--n", "3", "--t", "2"},
      {"compare", "--a", "opt0", "--b", "p0opt-hmw", "--n", "4", "--t", "2"},
      {"compare", "--a", "opt0", "--b", "opt1", "--n", "3", "--t", "2", "--mode", "last-decider"},
      {"beat-search", "--target", "p0", "--task", "consensus", "--n", "3", "--t", "1"},
      {"beat-search", "--target", "opt0", "--task", "consensus", "--n", "3", "--t", "1", "--mode", "last-decider"},
      {"oracle-check", "--n", "3", "--t", "2", "--values", "3", "--horizon", "3"},
      {"codec-check", "--n", "4", "--t", "1", "--values", "3", "--samples", "200", "--sizes", "8,16"},
  };
  for (const auto& cmd : commands) {
    std::string label;
    for (const auto& a : cmd) label += (label.empty() ? "" : " ") + a;
    const std::string reference = cli_results(cmd, "1");
    bool same = reference.rfind("usage", 0) != 0;
    for (const char* w : {"1", "2", "4", "8"}) same = same && cli_results(cmd, w) == reference;
    c.check(same, label + ": results byte-identical over repeats with 1, 2, 4, 8 workers (" +
                      std::to_string(reference.size()) + " bytes)");
  }
  return c.finish();
}

}  // namespace

int main() {
  std::printf("workers: %d\n", kWorkers);
  const std::vector<std::function<bool()>> criteria{correctness_and_bounds, domination, certificates, oracle,
                                                    hidden_variants,        coincidences, codec,      determinism};
  bool all = true;
  for (const auto& run : criteria) all = run() && all;
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
