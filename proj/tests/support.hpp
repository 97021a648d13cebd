#pragma once

// Shared builders for tests. Process ids in these helpers are 1-based, as in
// the adversary file format.

#include <initializer_list>
#include <set>
#include <vector>

#include "unbeat/model.hpp"

namespace unbeat::testing {

inline Mask ids(std::initializer_list<int> one_based) {
  Mask m = 0;
  for (int p : one_based) m |= bit(p - 1);
  return m;
}

inline Crash crash(int process, int round, std::initializer_list<int> delivers_to = {}) {
  return Crash{process - 1, round, ids(delivers_to)};
}

inline Adversary make_adversary(int t, std::vector<Value> values, std::vector<Crash> crashes = {}) {
  Adversary a;
  a.n = static_cast<int>(values.size());
  a.values = std::move(values);
  a.pattern.t = t;
  a.pattern.crashes = std::move(crashes);
  return a;
}

/// Forward reference for the seen relation: known[i] after round l is the
/// union of the sets of every sender whose round-l message reached i.
inline std::set<Node> reference_seen(const Adversary& adv, int i, int m) {
  std::vector<std::set<Node>> known(static_cast<std::size_t>(adv.n));
  for (int j = 0; j < adv.n; ++j) known[static_cast<std::size_t>(j)].insert({j, 0});
  for (int l = 1; l <= m; ++l) {
    auto next = known;
    for (int r = 0; r < adv.n; ++r) {
      if (!active_at(adv, r, l)) continue;
      auto& into = next[static_cast<std::size_t>(r)];
      for (int s = 0; s < adv.n; ++s) {
        const int c = adv.crash_round(s);
        bool delivered = c == 0 || c > l;
        if (c == l) {
          for (const auto& cr : adv.pattern.crashes) {
            if (cr.process == s) delivered = has(cr.delivers_to, r);
          }
        }
        if (delivered) into.insert(known[static_cast<std::size_t>(s)].begin(), known[static_cast<std::size_t>(s)].end());
      }
      into.insert({r, l});
    }
    known = std::move(next);
  }
  return known[static_cast<std::size_t>(i)];
}

}  // namespace unbeat::testing
