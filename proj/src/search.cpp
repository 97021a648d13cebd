#include "unbeat/search.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "unbeat/errors.hpp"
#include "unbeat/knowledge.hpp"
#include "unbeat/sat.hpp"

namespace unbeat {

namespace {

constexpr int kNever = INT_MAX;

std::optional<int> finite(int t) { return t == kNever ? std::nullopt : std::optional<int>(t); }

/// Last decision time of a run, kNever when a correct process is undecided.
int last_decision(const DecisionSchedule& s, const Adversary& adv, LastDeciderScope scope) {
  const Mask correct = adv.correct();
  for (int j = 0; j < adv.n; ++j) {
    if (has(correct, j) && !s.decisions[static_cast<std::size_t>(j)]) return kNever;
  }
  return s.last_decision_time(scope == LastDeciderScope::Correct ? correct : all_processes(adv.n));
}

struct Tally {
  std::uint64_t earlier = 0;
  std::uint64_t later = 0;
  std::vector<DominationWitness> witnesses;
  std::vector<DominationWitness> reverse;
};

void note(std::vector<DominationWitness>& list, DominationWitness w) {
  if (list.size() < kMaxWitnesses) list.push_back(std::move(w));
}

DominationReport compare_impl(const ScheduleFn& a, const ScheduleFn& b, const EnumerationDomain& dom, int workers,
                              std::optional<LastDeciderScope> last) {
  const AdversarySpace space(dom);
  constexpr std::uint64_t kChunk = 256;
  std::vector<Tally> tallies(chunk_count(space.size(), kChunk));
  parallel_chunks(space.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    Tally& tally = tallies[chunk];
    Adversary adv;
    DecisionSchedule sa;
    DecisionSchedule sb;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      space.at_into(idx, adv);
      a(adv, dom.horizon, sa);
      b(adv, dom.horizon, sb);
      if (last) {
        const int ma = last_decision(sa, adv, *last);
        const int mb = last_decision(sb, adv, *last);
        if (ma < mb) {
          ++tally.earlier;
          note(tally.witnesses, {idx, adv, -1, finite(ma), finite(mb)});
        } else if (mb < ma) {
          ++tally.later;
          note(tally.reverse, {idx, adv, -1, finite(ma), finite(mb)});
        }
        continue;
      }
      for (int i = 0; i < adv.n; ++i) {
        const auto& da = sa.decisions[static_cast<std::size_t>(i)];
        const auto& db = sb.decisions[static_cast<std::size_t>(i)];
        const std::optional<int> ta = da ? std::optional<int>(da->time) : std::nullopt;
        const std::optional<int> tb = db ? std::optional<int>(db->time) : std::nullopt;
        if (ta && (!tb || *ta < *tb)) {
          ++tally.earlier;
          note(tally.witnesses, {idx, adv, i, ta, tb});
        } else if (tb && (!ta || *tb < *ta)) {
          ++tally.later;
          note(tally.reverse, {idx, adv, i, ta, tb});
        }
      }
    }
  });

  DominationReport out;
  out.adversaries = space.size();
  for (auto& t : tallies) {
    out.earlier += t.earlier;
    out.later += t.later;
    for (auto& w : t.witnesses) note(out.witnesses, std::move(w));
    for (auto& w : t.reverse) note(out.reverse, std::move(w));
  }
  if (out.later == 0) {
    out.relation = out.earlier == 0 ? Relation::Dominates : Relation::StrictlyDominates;
  } else {
    out.relation = out.earlier == 0 ? Relation::Dominated : Relation::Incomparable;
  }
  return out;
}

}  // namespace

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::Dominates:
      return "DOMINATES";
    case Relation::StrictlyDominates:
      return "STRICTLY_DOMINATES";
    case Relation::Incomparable:
      return "INCOMPARABLE";
    case Relation::Dominated:
      return "DOMINATED";
  }
  return "UNKNOWN";
}

std::string_view scope_name(LastDeciderScope s) { return s == LastDeciderScope::Correct ? "correct" : "all"; }

std::optional<LastDeciderScope> parse_scope(std::string_view name) {
  if (name == "correct") return LastDeciderScope::Correct;
  if (name == "all") return LastDeciderScope::All;
  return std::nullopt;
}

std::string_view mode_name(SearchMode m) { return m == SearchMode::PerProcess ? "per-process" : "last-decider"; }

std::optional<SearchMode> parse_mode(std::string_view name) {
  if (name == "per-process") return SearchMode::PerProcess;
  if (name == "last-decider") return SearchMode::LastDecider;
  return std::nullopt;
}

ScheduleFn schedule_fn(const ProtocolSpec& spec) {
  return [spec](const Adversary& adv, int horizon, DecisionSchedule& out) {
    thread_local Simulator sim;
    sim.run(spec, adv, horizon, out);
  };
}

DominationReport compare(const ScheduleFn& a, const ScheduleFn& b, const EnumerationDomain& dom, int workers) {
  return compare_impl(a, b, dom, workers, std::nullopt);
}

DominationReport compare(const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom, int workers) {
  return compare(schedule_fn(a), schedule_fn(b), dom, workers);
}

DominationReport compare_last_decider(const ScheduleFn& a, const ScheduleFn& b, const EnumerationDomain& dom,
                                      LastDeciderScope scope, int workers) {
  return compare_impl(a, b, dom, workers, scope);
}

DominationReport compare_last_decider(const ProtocolSpec& a, const ProtocolSpec& b, const EnumerationDomain& dom,
                                      LastDeciderScope scope, int workers) {
  return compare_last_decider(schedule_fn(a), schedule_fn(b), dom, scope, workers);
}

std::optional<Value> ProtocolTable::lookup(const View& view) const {
  auto it = decision.find(view.fingerprint());
  return it == decision.end() ? std::nullopt : std::optional<Value>(it->second);
}

DecisionRule ProtocolTable::rule() const {
  return [this](const View& now, const View*) { return lookup(now); };
}

ScheduleFn ProtocolTable::schedule() const {
  return [this](const Adversary& adv, int horizon, DecisionSchedule& out) { out = run(adv, horizon); };
}

DecisionSchedule ProtocolTable::run(const Adversary& adv, int horizon) const {
  return simulate(rule(), adv, horizon);
}

namespace {

struct ViewInfo {
  int parent = -1;
  int time = 0;
  Mask vals = 0;
  bool target_here = false;  // the target's first decision is at this view
  bool target_by = false;    // the target has decided at or before this view
  int r = 0;                 // undecided before this view
  int d = 0;                 // decides at this view
  std::vector<int> a;        // a[v]: decides v here (0 when v is unknown)
};

class Encoder {
 public:
  Encoder(const ProtocolSpec& target, const TaskSpec& task, const EnumerationDomain& dom, const SearchOptions& opt)
      : target_(target), task_(task), dom_(dom), opt_(opt), space_(dom, opt.guard) {}

  SearchResult run() {
    collect();
    encode_views();
    encode_task();
    if (opt_.mode == SearchMode::PerProcess) {
      encode_per_process();
    } else if (opt_.scope == LastDeciderScope::Correct) {
      encode_last_correct();
    } else {
      encode_last_all();
    }

    SearchResult out;
    out.mode = opt_.mode;
    out.scope = opt_.scope;
    out.target_solves = target_solves_;
    out.target_decides_by_horizon = target_by_horizon_;
    const auto status = solver_.solve(opt_.budget);
    out.stats.adversaries = space_.size();
    out.stats.views = views_.size();
    out.stats.target_decision_views = static_cast<std::size_t>(
        std::count_if(views_.begin(), views_.end(), [](const ViewInfo& v) { return v.target_here; }));
    out.stats.variables = static_cast<std::size_t>(solver_.variables());
    out.stats.clauses = solver_.clauses();
    out.stats.conflicts = solver_.conflicts();
    out.stats.decisions = solver_.decisions();
    if (status == SatSolver::Result::Unknown) {
      throw Error(ErrorCode::SearchBudgetExceeded,
                  "no answer within " + std::to_string(opt_.budget) + " solver conflicts");
    }
    if (status == SatSolver::Result::Sat) {
      ProtocolTable table;
      for (std::size_t x = 0; x < views_.size(); ++x) {
        for (std::size_t v = 0; v < views_[x].a.size(); ++v) {
          if (views_[x].a[v] != 0 && solver_.value(views_[x].a[v])) table.decision[fingerprints_[x]] = static_cast<Value>(v);
        }
      }
      out.witness = std::move(table);
      out.witness_report = verify(*out.witness);
    } else {
      out.audit = audit();
    }
    return out;
  }

 private:
  int chain(std::uint64_t idx, int i, int m) const {
    return chains_[(idx * static_cast<std::uint64_t>(dom_.n) + static_cast<std::uint64_t>(i)) *
                       static_cast<std::uint64_t>(dom_.horizon + 1) +
                   static_cast<std::uint64_t>(m)];
  }

  void collect() {
    const int n = dom_.n;
    const int h = dom_.horizon;
    chains_.assign(space_.size() * static_cast<std::uint64_t>(n * (h + 1)), -1);
    target_last_correct_.resize(space_.size());
    target_last_all_.resize(space_.size());
    std::unordered_map<std::string, int> ids;
    Simulator sim;
    CommunicationGraph graph;
    View view;
    Adversary adv;
    DecisionSchedule sched;
    for (std::uint64_t idx = 0; idx < space_.size(); ++idx) {
      space_.at_into(idx, adv);
      sim.run(target_, adv, h, sched);
      if (!check_run(task_, adv, sched).pass()) target_solves_ = false;
      target_last_correct_[idx] = last_decision(sched, adv, LastDeciderScope::Correct);
      target_last_all_[idx] = last_decision(sched, adv, LastDeciderScope::All);
      graph.assign(adv, h);
      for (int i = 0; i < n; ++i) {
        const auto& dec = sched.decisions[static_cast<std::size_t>(i)];
        if (active_at(adv, i, h) && !(dec && dec->time <= h)) target_by_horizon_ = false;
        for (int m = 0; m <= h && active_at(adv, i, m); ++m) {
          graph.view_into(i, m, view);
          std::string fp = view.fingerprint();
          const int parent = m > 0 ? chain(idx, i, m - 1) : -1;
          const bool here = dec && dec->time == m;
          const bool by = dec && dec->time <= m;
          auto [it, inserted] = ids.try_emplace(std::move(fp), static_cast<int>(views_.size()));
          if (inserted) {
            ViewInfo info;
            info.parent = parent;
            info.time = m;
            info.vals = known_values(view).vals;
            info.target_here = here;
            info.target_by = by;
            views_.push_back(std::move(info));
            fingerprints_.push_back(it->first);
          } else {
            const auto& info = views_[static_cast<std::size_t>(it->second)];
            if (info.parent != parent || info.target_here != here || info.target_by != by) {
              throw std::logic_error("decision or parent is not a function of the view");
            }
          }
          chains_[(idx * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i)) *
                      static_cast<std::uint64_t>(h + 1) +
                  static_cast<std::uint64_t>(m)] = it->second;
        }
      }
    }
  }

  void encode_views() {
    for (auto& x : views_) {
      x.r = solver_.new_var();
      x.d = solver_.new_var();
      x.a.assign(static_cast<std::size_t>(dom_.value_count), 0);
      std::vector<int> some{-x.d};
      for (int v = 0; v < dom_.value_count; ++v) {
        if (!has(x.vals, v)) continue;
        const int a = solver_.new_var();
        x.a[static_cast<std::size_t>(v)] = a;
        some.push_back(a);
        solver_.add_clause({-a, x.d});
        solver_.add_clause({-a, x.r});
      }
      solver_.add_clause(some);
      for (std::size_t p = 1; p < some.size(); ++p) {
        for (std::size_t q = p + 1; q < some.size(); ++q) solver_.add_clause({-some[p], -some[q]});
      }
    }
    for (const auto& x : views_) {
      if (x.parent < 0) {
        solver_.add_clause({x.r});
        continue;
      }
      const auto& p = views_[static_cast<std::size_t>(x.parent)];
      solver_.add_clause({-x.r, p.r});
      solver_.add_clause({-x.r, -p.d});
      solver_.add_clause({x.r, -p.r, p.d});
    }
  }

  /// The chain through view x has decided at or before x.
  std::vector<int> decided_by(int x) const {
    const auto& v = views_[static_cast<std::size_t>(x)];
    return {-v.r, v.d};
  }

  void encode_task() {
    const int n = dom_.n;
    const int h = dom_.horizon;
    std::set<int> final_views;
    std::set<std::vector<int>> groups;
    std::set<std::pair<int, Value>> forbidden;
    Adversary adv;
    for (std::uint64_t idx = 0; idx < space_.size(); ++idx) {
      space_.at_into(idx, adv);
      const Mask correct = adv.correct();
      for (int i = 0; i < n; ++i) {
        if (has(correct, i)) final_views.insert(chain(idx, i, h));
      }
      const Mask relevant = task_.uniform() ? all_processes(n) : correct;
      std::vector<int> group;
      Mask vals = 0;
      for (int i = 0; i < n; ++i) {
        if (!has(relevant, i)) continue;
        for (int m = 0; m <= h && chain(idx, i, m) >= 0; ++m) {
          group.push_back(chain(idx, i, m));
          vals |= views_[static_cast<std::size_t>(chain(idx, i, m))].vals;
        }
      }
      if (popcount(vals) > task_.agreement_bound()) {
        std::sort(group.begin(), group.end());
        group.erase(std::unique(group.begin(), group.end()), group.end());
        groups.insert(std::move(group));
      }
      if (task_.kind == TaskKind::MajorityConsensus) {
        for (Value v : {0, 1}) {
          int support = 0;
          for (int j = 0; j < n; ++j) {
            if (has(correct, j) && adv.values[static_cast<std::size_t>(j)] == v) ++support;
          }
          if (2 * support <= n) continue;
          for (int i = 0; i < n; ++i) {
            for (int m = 0; m <= h && chain(idx, i, m) >= 0; ++m) forbidden.insert({chain(idx, i, m), 1 - v});
          }
        }
      }
    }
    for (int y : final_views) solver_.add_clause(decided_by(y));
    for (const auto& [x, v] : forbidden) {
      const int a = views_[static_cast<std::size_t>(x)].a[static_cast<std::size_t>(v)];
      if (a != 0) solver_.add_clause({-a});
    }
    for (const auto& group : groups) encode_agreement(group);
  }

  /// At most agreement_bound() distinct values among decisions in the group.
  void encode_agreement(const std::vector<int>& group) {
    std::vector<int> z(static_cast<std::size_t>(dom_.value_count), 0);
    for (int x : group) {
      const auto& info = views_[static_cast<std::size_t>(x)];
      for (int v = 0; v < dom_.value_count; ++v) {
        const int a = info.a[static_cast<std::size_t>(v)];
        if (a == 0) continue;
        auto& zv = z[static_cast<std::size_t>(v)];
        if (zv == 0) zv = solver_.new_var();
        solver_.add_clause({-a, zv});
      }
    }
    std::vector<int> used;
    for (int zv : z) {
      if (zv != 0) used.push_back(zv);
    }
    const int k = task_.agreement_bound();
    // every (k+1)-subset of the used values may not all be decided
    std::vector<bool> pick(used.size(), false);
    std::fill(pick.end() - (k + 1), pick.end(), true);
    do {
      std::vector<int> clause;
      for (std::size_t p = 0; p < used.size(); ++p) {
        if (pick[p]) clause.push_back(-used[p]);
      }
      solver_.add_clause(clause);
    } while (std::next_permutation(pick.begin(), pick.end()));
  }

  void encode_per_process() {
    std::vector<int> strict;
    for (std::size_t x = 0; x < views_.size(); ++x) {
      if (views_[x].target_here) solver_.add_clause(decided_by(static_cast<int>(x)));
      if (!views_[x].target_by) strict.push_back(views_[x].d);
    }
    solver_.add_clause(strict);
  }

  void encode_last_correct() {
    const int n = dom_.n;
    std::set<int> bounded;
    std::set<std::vector<int>> keys;
    std::vector<int> strict;
    Adversary adv;
    for (std::uint64_t idx = 0; idx < space_.size(); ++idx) {
      const int last = target_last_correct_[idx];
      space_.at_into(idx, adv);
      const Mask correct = adv.correct();
      if (last == kNever) {
        // the target leaves a correct process undecided; any solution beats it here
        strict.push_back(solver_.new_var());
        continue;
      }
      std::vector<int> key{last};
      for (int i = 0; i < n; ++i) {
        if (!has(correct, i)) continue;
        bounded.insert(chain(idx, i, last));
        if (last > 0) key.push_back(chain(idx, i, last - 1));
      }
      if (last == 0 || !keys.insert(key).second) continue;
      const int s = solver_.new_var();
      strict.push_back(s);
      for (std::size_t p = 1; p < key.size(); ++p) {
        auto clause = decided_by(key[p]);
        clause.push_back(-s);
        solver_.add_clause(clause);
      }
    }
    for (int y : bounded) solver_.add_clause(decided_by(y));
    solver_.add_clause(strict);
  }

  void encode_last_all() {
    const int n = dom_.n;
    const int h = dom_.horizon;
    std::set<int> silent;
    std::set<std::vector<int>> keys;
    std::vector<int> strict;
    for (std::uint64_t idx = 0; idx < space_.size(); ++idx) {
      const int last = target_last_all_[idx];
      if (last == kNever) {
        strict.push_back(solver_.new_var());
        continue;
      }
      std::vector<int> key{last};
      for (int i = 0; i < n; ++i) {
        for (int m = std::max(last, 0); m <= h && chain(idx, i, m) >= 0; ++m) {
          if (m > last) silent.insert(chain(idx, i, m));
          key.push_back(chain(idx, i, m));
        }
      }
      if (!keys.insert(key).second) continue;
      const int s = solver_.new_var();
      strict.push_back(s);
      for (std::size_t p = 1; p < key.size(); ++p) {
        solver_.add_clause({-s, -views_[static_cast<std::size_t>(key[p])].d});
      }
    }
    for (int y : silent) solver_.add_clause({-views_[static_cast<std::size_t>(y)].d});
    solver_.add_clause(strict);
  }

  DominationReport relate(const ScheduleFn& candidate) const {
    const auto target = schedule_fn(target_);
    if (opt_.mode == SearchMode::PerProcess) return compare(candidate, target, dom_, opt_.workers);
    return compare_last_decider(candidate, target, dom_, opt_.scope, opt_.workers);
  }

  bool solves(const ScheduleFn& fn) const {
    Adversary adv;
    DecisionSchedule sched;
    for (std::uint64_t idx = 0; idx < space_.size(); ++idx) {
      space_.at_into(idx, adv);
      fn(adv, dom_.horizon, sched);
      if (!check_run(task_, adv, sched).pass()) return false;
    }
    return true;
  }

  DominationReport verify(const ProtocolTable& table) const {
    if (!solves(table.schedule())) throw std::logic_error("search produced a table that does not solve the task");
    auto report = relate(table.schedule());
    if (report.relation != Relation::StrictlyDominates) {
      throw std::logic_error("search produced a table that does not strictly dominate the target");
    }
    return report;
  }

  std::vector<AuditEntry> audit() const {
    std::vector<AuditEntry> out;
    for (ProtocolId id : all_protocols()) {
      ProtocolSpec spec{id, std::nullopt, dom_.value_count, dom_.t, dom_.n};
      if (id == ProtocolId::OptMinK || id == ProtocolId::UProtMinK) spec.k = task_.k;
      try {
        spec.validate();
      } catch (const Error&) {
        continue;
      }
      AuditEntry entry{spec, solves(schedule_fn(spec)), relate(schedule_fn(spec)).relation};
      if (entry.solves && entry.relation == Relation::StrictlyDominates) {
        throw std::logic_error("certificate contradicted by " + spec.label());
      }
      out.push_back(std::move(entry));
    }
    return out;
  }

  const ProtocolSpec& target_;
  const TaskSpec& task_;
  const EnumerationDomain& dom_;
  const SearchOptions& opt_;
  AdversarySpace space_;
  SatSolver solver_;
  std::vector<ViewInfo> views_;
  std::vector<std::string> fingerprints_;
  std::vector<int> chains_;
  std::vector<int> target_last_correct_;
  std::vector<int> target_last_all_;
  bool target_solves_ = true;
  bool target_by_horizon_ = true;
};

}  // namespace

SearchResult beat_search(const ProtocolSpec& target, const TaskSpec& task, const EnumerationDomain& dom,
                         const SearchOptions& options) {
  target.validate();
  task.validate();
  dom.validate(options.guard);
  if (options.guard && (dom.n > 3 || dom.t > 1 || dom.value_count != 2 || dom.horizon != dom.t + 1)) {
    throw Error(ErrorCode::DomainTooLarge, "search guard is n <= 3, t <= 1, binary values, horizon t+1");
  }
  if (target.n != dom.n || target.t != dom.t || target.value_count != dom.value_count ||
      task.value_count != dom.value_count) {
    throw Error(ErrorCode::InvalidProtocol, "target, task and domain parameters differ");
  }
  return Encoder(target, task, dom, options).run();
}

}  // namespace unbeat
