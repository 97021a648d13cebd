#include "unbeat/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace unbeat {

namespace {

// Luby sequence scaled by powers of y.
double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

int SatSolver::new_var() {
  const int v = static_cast<int>(assign_.size());
  assign_.push_back(kUndef);
  phase_.push_back(kFalse);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  activity_.push_back(0.0);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v + 1;
}

void SatSolver::add_clause(std::vector<int> dimacs) {
  ++clause_count_;
  if (root_conflict_) return;
  std::vector<Lit> lits;
  lits.reserve(dimacs.size());
  for (int l : dimacs) {
    const int v = std::abs(l) - 1;
    if (l == 0 || v >= variables()) throw std::invalid_argument("literal names an unknown variable");
    lits.push_back(2 * v + (l < 0 ? 1 : 0));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return;  // tautology
    const auto v = lit_value(lits[i]);
    if (v == kTrue) return;
    if (v == kUndef) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    root_conflict_ = true;
  } else if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) root_conflict_ = true;
  } else {
    attach(std::move(kept));
  }
}

int SatSolver::attach(std::vector<Lit> lits) {
  const int idx = static_cast<int>(clause_lits_.size());
  watches_[static_cast<std::size_t>(lits[0])].push_back(idx);
  watches_[static_cast<std::size_t>(lits[1])].push_back(idx);
  clause_lits_.push_back(std::move(lits));
  return idx;
}

void SatSolver::enqueue(Lit p, int reason) {
  const auto v = static_cast<std::size_t>(var(p));
  assign_[v] = (p & 1) ? kFalse : kTrue;
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(p);
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit false_lit = neg(trail_[qhead_++]);
    auto& ws = watches_[static_cast<std::size_t>(false_lit)];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const int ci = ws[i];
      auto& c = clause_lits_[static_cast<std::size_t>(ci)];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == kTrue) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[static_cast<std::size_t>(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[keep++] = ci;
      if (lit_value(c[0]) == kFalse) {
        for (++i; i < ws.size(); ++i) ws[keep++] = ws[i];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(keep);
  }
  return kNoReason;
}

void SatSolver::analyze(int conflict, std::vector<Lit>& learnt, int& back_level) {
  const int current = static_cast<int>(trail_lim_.size());
  learnt.assign(1, 0);
  int open = 0;
  Lit p = -1;
  std::size_t idx = trail_.size();
  int confl = conflict;
  do {
    const auto& c = clause_lits_[static_cast<std::size_t>(confl)];
    for (std::size_t j = (p == -1 ? 0 : 1); j < c.size(); ++j) {
      const Lit q = c[j];
      const auto v = static_cast<std::size_t>(var(q));
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      bump(var(q));
      if (level_[v] >= current) {
        ++open;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[static_cast<std::size_t>(var(trail_[--idx]))]) {
    }
    p = trail_[idx];
    confl = reason_[static_cast<std::size_t>(var(p))];
    seen_[static_cast<std::size_t>(var(p))] = 0;
    --open;
  } while (open > 0);
  learnt[0] = neg(p);

  back_level = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (level_[static_cast<std::size_t>(var(learnt[i]))] > level_[static_cast<std::size_t>(var(learnt[best]))]) best = i;
    }
    std::swap(learnt[1], learnt[best]);
    back_level = level_[static_cast<std::size_t>(var(learnt[1]))];
  }
  for (std::size_t i = 1; i < learnt.size(); ++i) seen_[static_cast<std::size_t>(var(learnt[i]))] = 0;
}

void SatSolver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  const std::size_t stop = trail_lim_[static_cast<std::size_t>(level)];
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const auto v = static_cast<std::size_t>(var(trail_[i]));
    phase_[v] = assign_[v];
    assign_[v] = kUndef;
    reason_[v] = kNoReason;
    if (heap_pos_[v] < 0) heap_insert(static_cast<int>(v));
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

void SatSolver::bump(int v) {
  auto& a = activity_[static_cast<std::size_t>(v)];
  a += var_inc_;
  if (a > 1e100) {
    for (auto& x : activity_) x *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[static_cast<std::size_t>(v)] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[static_cast<std::size_t>(v)]));
}

int SatSolver::pick_branch() {
  while (!heap_.empty()) {
    const int v = heap_pop();
    if (assign_[static_cast<std::size_t>(v)] == kUndef) return v;
  }
  return -1;
}

void SatSolver::heap_insert(int v) {
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void SatSolver::heap_up(std::size_t pos) {
  const int v = heap_[pos];
  while (pos > 0) {
    const std::size_t parent = (pos - 1) / 2;
    if (activity_[static_cast<std::size_t>(heap_[parent])] >= activity_[static_cast<std::size_t>(v)]) break;
    heap_[pos] = heap_[parent];
    heap_pos_[static_cast<std::size_t>(heap_[pos])] = static_cast<int>(pos);
    pos = parent;
  }
  heap_[pos] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(pos);
}

void SatSolver::heap_down(std::size_t pos) {
  const int v = heap_[pos];
  const std::size_t size = heap_.size();
  while (true) {
    std::size_t child = 2 * pos + 1;
    if (child >= size) break;
    if (child + 1 < size &&
        activity_[static_cast<std::size_t>(heap_[child + 1])] > activity_[static_cast<std::size_t>(heap_[child])]) {
      ++child;
    }
    if (activity_[static_cast<std::size_t>(heap_[child])] <= activity_[static_cast<std::size_t>(v)]) break;
    heap_[pos] = heap_[child];
    heap_pos_[static_cast<std::size_t>(heap_[pos])] = static_cast<int>(pos);
    pos = child;
  }
  heap_[pos] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(pos);
}

int SatSolver::heap_pop() {
  const int top = heap_.front();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  const int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

SatSolver::Result SatSolver::solve(std::uint64_t conflict_budget) {
  if (root_conflict_) return Result::Unsat;
  std::vector<Lit> learnt;
  int restarts = 0;
  std::uint64_t since_restart = 0;
  auto restart_limit = static_cast<std::uint64_t>(luby(2, restarts) * 100);
  const std::uint64_t start = conflicts_;
  while (true) {
    const int confl = propagate();
    if (confl != kNoReason) {
      ++conflicts_;
      ++since_restart;
      if (trail_lim_.empty()) {
        root_conflict_ = true;
        return Result::Unsat;
      }
      int back_level = 0;
      analyze(confl, learnt, back_level);
      backtrack(back_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const Lit first = learnt[0];
        enqueue(first, attach(learnt));
      }
      var_inc_ /= 0.95;
      continue;
    }
    if (since_restart >= restart_limit) {
      backtrack(0);
      since_restart = 0;
      restart_limit = static_cast<std::uint64_t>(luby(2, ++restarts) * 100);
    }
    if (conflicts_ - start > conflict_budget) {
      backtrack(0);
      return Result::Unknown;
    }
    const int v = pick_branch();
    if (v < 0) {
      model_ = assign_;
      backtrack(0);
      return Result::Sat;
    }
    ++decisions_;
    trail_lim_.push_back(trail_.size());
    enqueue(2 * v + (phase_[static_cast<std::size_t>(v)] == kTrue ? 0 : 1), kNoReason);
  }
}

}  // namespace unbeat
