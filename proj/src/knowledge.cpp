#include "unbeat/knowledge.hpp"

#include <algorithm>
#include <limits>

#include "unbeat/errors.hpp"

namespace unbeat {

namespace {

// Level-0 processes seen by the seen node <j,level>, using only the edges
// recorded in the view.
Mask origins(const View& view, int j, int level) {
  Mask cur = bit(j);
  for (int l = level; l >= 1; --l) {
    Mask next = 0;
    for (Mask rest = cur; rest != 0; rest &= rest - 1) {
      next |= view.in_edges(l, std::countr_zero(rest));
    }
    cur = next;
  }
  return cur;
}

Mask values_of(const View& view, Mask level0) {
  Mask vals = 0;
  for (Mask rest = level0; rest != 0; rest &= rest - 1) {
    if (auto v = view.initial_value(std::countr_zero(rest))) vals |= bit(*v);
  }
  return vals;
}

std::vector<int> crash_evidence(const View& view) {
  const int n = view.n();
  std::vector<int> by(static_cast<std::size_t>(n), 0);
  Mask proven = 0;
  for (int l = 1; l <= view.time(); ++l) {
    Mask missing = 0;
    for (Mask rest = view.seen_at(l); rest != 0; rest &= rest - 1) {
      missing |= all_processes(n) & ~view.in_edges(l, std::countr_zero(rest));
    }
    for (Mask fresh = missing & ~proven; fresh != 0; fresh &= fresh - 1) {
      by[static_cast<std::size_t>(std::countr_zero(fresh))] = l;
    }
    proven |= missing;
  }
  return by;
}

Mask proven_by(const std::vector<int>& crashed_by, int level) {
  Mask m = 0;
  for (std::size_t j = 0; j < crashed_by.size(); ++j) {
    if (crashed_by[j] != 0 && crashed_by[j] <= level) m |= bit(static_cast<int>(j));
  }
  return m;
}

void check_binary(Value v) {
  if (v != 0 && v != 1) throw Error(ErrorCode::NonBinaryTask, "value " + std::to_string(v));
}

}  // namespace

std::vector<Value> KnownValueSet::list() const {
  std::vector<Value> out;
  for (Mask rest = vals; rest != 0; rest &= rest - 1) out.push_back(std::countr_zero(rest));
  return out;
}

KnownValueSet known_values(const View& view, std::optional<int> k) {
  KnownValueSet out;
  out.vals = values_of(view, view.seen_at(0));
  if (out.vals != 0) out.min = std::countr_zero(out.vals);
  if (k) out.lows = out.vals & (bit(*k) - 1);
  return out;
}

bool hidden(const View& view, int j, int level) {
  if (level < 0 || level > view.time()) return false;
  if (view.sees({j, level})) return false;
  auto by = crash_evidence(view);
  int c = by[static_cast<std::size_t>(j)];
  return c == 0 || c > level;
}

HiddenProfile hidden_profile(const View& view) {
  HiddenProfile out;
  auto by = crash_evidence(view);
  const Mask all = all_processes(view.n());
  out.capacity = std::numeric_limits<int>::max();
  for (int l = 0; l <= view.time(); ++l) {
    Mask h = all & ~view.seen_at(l) & ~proven_by(by, l);
    out.hidden_by_level.push_back(h);
    out.capacity = std::min(out.capacity, popcount(h));
  }
  return out;
}

bool hidden_path_exists(const View& view, HiddenPathRule rule) {
  auto profile = hidden_profile(view);
  int top = rule == HiddenPathRule::Literal ? view.time() : view.time() - 1;
  for (int l = 0; l <= top; ++l) {
    if (profile.hidden_by_level[static_cast<std::size_t>(l)] == 0) return false;
  }
  return true;
}

Mask FailureKnowledge::crashed() const { return proven_by(known_crashed_by, std::numeric_limits<int>::max()); }

FailureKnowledge failure_knowledge(const View& view) {
  FailureKnowledge out;
  out.known_crashed_by = crash_evidence(view);
  if (view.time() > 0) {
    const auto i = view.owner().process;
    out.knownf = popcount(all_processes(view.n()) & ~view.in_edges(view.time(), i) & ~bit(i));
  }
  return out;
}

bool knows_exists_correct(const View& now, const View* prev, Value v, int t) {
  const Node owner = now.owner();
  if (owner.time == 0) {
    if (prev != nullptr) throw Error(ErrorCode::MismatchedViews, "no predecessor at time 0");
  } else {
    if (prev == nullptr || prev->owner() != Node{owner.process, owner.time - 1}) {
      throw Error(ErrorCode::MismatchedViews, "predecessor view missing or of another node");
    }
    for (int l = 0; l < owner.time; ++l) {
      if ((prev->seen_at(l) & ~now.seen_at(l)) != 0) {
        throw Error(ErrorCode::MismatchedViews, "predecessor sees nodes the current view lacks");
      }
    }
  }
  if (!has(known_values(now).vals, v)) return false;
  if (prev != nullptr && has(known_values(*prev).vals, v)) return true;
  int witnesses = 0;
  if (owner.time > 0) {
    for (Mask rest = now.in_edges(owner.time, owner.process); rest != 0; rest &= rest - 1) {
      int j = std::countr_zero(rest);
      if (has(values_of(now, origins(now, j, owner.time - 1)), v)) ++witnesses;
    }
  }
  return witnesses >= t - failure_knowledge(now).knownf;
}

bool knows_majority(const View& view, Value v, int n) {
  check_binary(v);
  int count = 0;
  for (int j = 0; j < view.n(); ++j) {
    auto x = view.initial_value(j);
    if (!x) continue;
    check_binary(*x);
    if (*x == v) ++count;
  }
  return v == 0 ? 2 * count > n : 2 * count >= n;
}

Value maj_vals(const View& view) {
  int zeros = 0;
  int known = 0;
  for (int j = 0; j < view.n(); ++j) {
    auto x = view.initial_value(j);
    if (!x) continue;
    check_binary(*x);
    ++known;
    if (*x == 0) ++zeros;
  }
  return 2 * zeros > known ? 0 : 1;
}

Value Knowledge::min_value() const { return std::countr_zero(vals); }

void summarize_into(const View& view, Knowledge& out) {
  const int n = view.n();
  const int m = view.time();
  const int i = view.owner().process;
  const Mask all = all_processes(n);
  out.owner = view.owner();
  out.n = n;
  out.initial.assign(static_cast<std::size_t>(n), -1);
  out.vals = 0;
  for (int j = 0; j < n; ++j) {
    if (auto v = view.initial_value(j)) {
      out.initial[static_cast<std::size_t>(j)] = *v;
      out.vals |= bit(*v);
    }
  }
  out.crashed_by = crash_evidence(view);
  out.crashed = proven_by(out.crashed_by, m);
  out.hidden_by_level.assign(static_cast<std::size_t>(m + 1), 0);
  out.capacity = std::numeric_limits<int>::max();
  for (int l = 0; l <= m; ++l) {
    Mask h = all & ~view.seen_at(l) & ~proven_by(out.crashed_by, l);
    out.hidden_by_level[static_cast<std::size_t>(l)] = h;
    out.capacity = std::min(out.capacity, popcount(h));
  }
  out.witness_vals.assign(static_cast<std::size_t>(n), 0);
  if (m > 0) {
    out.witnesses = view.in_edges(m, i);
    out.knownf = popcount(all & ~out.witnesses & ~bit(i));
    for (Mask rest = out.witnesses; rest != 0; rest &= rest - 1) {
      int j = std::countr_zero(rest);
      out.witness_vals[static_cast<std::size_t>(j)] = values_of(view, origins(view, j, m - 1));
    }
  } else {
    out.witnesses = 0;
    out.knownf = 0;
  }
}

Knowledge summarize(const View& view) {
  Knowledge k;
  summarize_into(view, k);
  return k;
}

bool knows_exists_correct(const Knowledge& now, Value v, int t) {
  if (!has(now.vals, v)) return false;
  const int i = now.owner.process;
  if (now.time() > 0 && has(now.witness_vals[static_cast<std::size_t>(i)], v)) return true;
  int witnesses = 0;
  for (Mask rest = now.witnesses; rest != 0; rest &= rest - 1) {
    if (has(now.witness_vals[static_cast<std::size_t>(std::countr_zero(rest))], v)) ++witnesses;
  }
  return witnesses >= t - now.knownf;
}

bool knows_majority(const Knowledge& now, Value v) {
  check_binary(v);
  int count = 0;
  for (int x : now.initial) {
    if (x < 0) continue;
    check_binary(x);
    if (x == v) ++count;
  }
  return v == 0 ? 2 * count > now.n : 2 * count >= now.n;
}

Value maj_vals(const Knowledge& now) {
  int zeros = 0;
  int known = 0;
  for (int x : now.initial) {
    if (x < 0) continue;
    check_binary(x);
    ++known;
    if (x == 0) ++zeros;
  }
  return 2 * zeros > known ? 0 : 1;
}

}  // namespace unbeat
