#include "unbeat/oracle.hpp"

#include <algorithm>
#include <unordered_map>

#include "unbeat/errors.hpp"
#include "unbeat/knowledge.hpp"

namespace unbeat {

namespace {

constexpr int kFactKinds = 5;
constexpr int kMaxValues = 8;

int fact_bit(FactKind kind, Value v) { return static_cast<int>(kind) * kMaxValues + v; }

int last_crash_round(const Adversary& adv) {
  int last = 0;
  for (const auto& c : adv.pattern.crashes) last = std::max(last, c.round);
  return last;
}

/// vals[l*n + j]: values known to <j,l>, by forward propagation.
std::vector<Mask> forward_vals(const Adversary& adv, const CommunicationGraph& g) {
  const int n = adv.n;
  std::vector<Mask> vals(static_cast<std::size_t>((g.depth() + 1) * n), 0);
  for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(j)] = bit(adv.values[static_cast<std::size_t>(j)]);
  for (int l = 1; l <= g.depth(); ++l) {
    for (int j = 0; j < n; ++j) {
      if (!has(g.active(l), j)) continue;
      Mask acc = 0;
      for (Mask rest = g.received(l, j); rest != 0; rest &= rest - 1) {
        acc |= vals[static_cast<std::size_t>((l - 1) * n + std::countr_zero(rest))];
      }
      vals[static_cast<std::size_t>(l * n + j)] = acc;
    }
  }
  return vals;
}

Mask correct_vals_at(const Adversary& adv, const std::vector<Mask>& vals, int m) {
  Mask out = 0;
  for (Mask rest = adv.correct(); rest != 0; rest &= rest - 1) {
    out |= vals[static_cast<std::size_t>(m * adv.n + std::countr_zero(rest))];
  }
  return out;
}

bool majority(const Adversary& adv, Value v) {
  int count = 0;
  for (Value x : adv.values) count += x == v;
  return v == 0 ? 2 * count > adv.n : 2 * count >= adv.n;
}

/// Facts that do not depend on m, and those that do, as bit sets.
struct FactTable {
  std::uint64_t fixed = 0;
  std::vector<std::uint64_t> at_time;  // index m
};

FactTable fact_table(const Adversary& adv, int horizon, int value_count) {
  const int lc = last_crash_round(adv);
  CommunicationGraph g(adv, std::max(horizon, lc + 1));
  auto vals = forward_vals(adv, g);
  const Mask final_vals = correct_vals_at(adv, vals, lc + 1);
  FactTable out;
  for (Value v = 0; v < value_count; ++v) {
    if (std::find(adv.values.begin(), adv.values.end(), v) != adv.values.end()) {
      out.fixed |= std::uint64_t{1} << fact_bit(FactKind::Exists, v);
    }
    if (!has(final_vals, v)) out.fixed |= std::uint64_t{1} << fact_bit(FactKind::NeverKnown, v);
    if (v <= 1 && majority(adv, v)) out.fixed |= std::uint64_t{1} << fact_bit(FactKind::Maj, v);
  }
  for (int m = 0; m <= horizon; ++m) {
    std::uint64_t bits = 0;
    const Mask now = correct_vals_at(adv, vals, m);
    const Mask later = correct_vals_at(adv, vals, std::max(m, lc + 1));
    for (Value v = 0; v < value_count; ++v) {
      if (has(now, v)) bits |= std::uint64_t{1} << fact_bit(FactKind::ExistsCorrect, v);
      if (has(later, v)) bits |= std::uint64_t{1} << fact_bit(FactKind::ExistsCorrectEventually, v);
    }
    out.at_time.push_back(bits);
  }
  return out;
}

/// Combinatorial predicate bits in the same layout as the facts they mirror.
std::uint64_t predicate_bits(const Knowledge& k, int t, int value_count) {
  std::uint64_t bits = 0;
  for (Value v = 0; v < value_count; ++v) {
    if (has(k.vals, v)) bits |= std::uint64_t{1} << fact_bit(FactKind::Exists, v);
    if (knows_exists_correct(k, v, t)) {
      bits |= std::uint64_t{1} << fact_bit(FactKind::ExistsCorrect, v);
      bits |= std::uint64_t{1} << fact_bit(FactKind::ExistsCorrectEventually, v);
    }
  }
  if (!has(k.vals, 0) && !k.hidden_path()) bits |= std::uint64_t{1} << fact_bit(FactKind::NeverKnown, 0);
  if (value_count == 2) {
    for (Value v : {0, 1}) {
      if (knows_majority(k, v)) bits |= std::uint64_t{1} << fact_bit(FactKind::Maj, v);
    }
  }
  return bits;
}

struct ViewEntry {
  std::uint64_t semantic = ~std::uint64_t{0};
  std::uint64_t combinatorial = 0;
  std::uint64_t first_index = 0;
  int owner = 0;
  int time = 0;
};

}  // namespace

std::string FactId::label() const {
  const std::string v_str = std::to_string(v);
  switch (kind) {
    case FactKind::Exists: return "EXISTS(" + v_str + ")";
    case FactKind::ExistsCorrect: return "EXISTS_CORRECT(" + v_str + ")";
    case FactKind::ExistsCorrectEventually: return "EXISTS_CORRECT_EVENTUALLY(" + v_str + ")";
    case FactKind::NeverKnown: return "NEVER_KNOWN(" + v_str + ")";
    case FactKind::Maj: return "MAJ(" + v_str + ")";
  }
  return "?";
}

bool eval_fact(const Adversary& adv, int m, FactId fact) {
  int value_count = fact.v + 1;
  for (Value x : adv.values) value_count = std::max(value_count, x + 1);
  auto table = fact_table(adv, m, value_count);
  const auto mask = std::uint64_t{1} << fact_bit(fact.kind, fact.v);
  return ((table.fixed | table.at_time[static_cast<std::size_t>(m)]) & mask) != 0;
}

std::vector<Adversary> indistinguishable(const EnumerationDomain& dom, const View& v) {
  AdversarySpace space(dom);
  std::vector<Adversary> out;
  const Node owner = v.owner();
  CommunicationGraph g;
  View other;
  Adversary a;
  for (std::uint64_t idx = 0; idx < space.size(); ++idx) {
    space.at_into(idx, a);
    if (!active_at(a, owner.process, owner.time)) continue;
    g.assign(a, owner.time);
    g.view_into(owner.process, owner.time, other);
    if (other == v) out.push_back(a);
  }
  return out;
}

bool knows(const EnumerationDomain& dom, const View& v, FactId fact) {
  for (const auto& a : indistinguishable(dom, v)) {
    if (!eval_fact(a, v.time(), fact)) return false;
  }
  return true;
}

bool OracleSweep::pass(bool include_diagnostic) const {
  for (const auto& r : rows) {
    if ((include_diagnostic || !r.diagnostic) && r.disagreements != 0) return false;
  }
  return true;
}

OracleSweep oracle_sweep(const EnumerationDomain& dom, int workers) {
  if (dom.value_count > kMaxValues) throw Error(ErrorCode::DomainTooLarge, "at most 8 values");
  AdversarySpace space(dom);
  constexpr std::uint64_t kChunk = 512;
  using Map = std::unordered_map<std::string, ViewEntry>;
  std::vector<Map> partial(chunk_count(space.size(), kChunk));
  parallel_chunks(space.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    Map& local = partial[chunk];
    Adversary a;
    CommunicationGraph g;
    View v;
    Knowledge k;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      space.at_into(idx, a);
      auto facts = fact_table(a, dom.horizon, dom.value_count);
      g.assign(a, dom.horizon);
      for (int i = 0; i < dom.n; ++i) {
        for (int m = 0; m <= dom.horizon && has(g.active(m), i); ++m) {
          g.view_into(i, m, v);
          auto [it, fresh] = local.try_emplace(v.fingerprint());
          if (fresh) {
            summarize_into(v, k);
            it->second.combinatorial = predicate_bits(k, dom.t, dom.value_count);
            it->second.first_index = idx;
            it->second.owner = i;
            it->second.time = m;
          }
          it->second.semantic &= facts.fixed | facts.at_time[static_cast<std::size_t>(m)];
        }
      }
    }
  });
  Map all;
  for (auto& local : partial) {
    for (auto& [key, entry] : local) {
      auto [it, fresh] = all.try_emplace(key, entry);
      if (!fresh) it->second.semantic &= entry.semantic;
    }
    Map().swap(local);
  }

  OracleSweep out;
  out.domain = dom;
  out.adversaries = space.size();
  out.distinct_views = all.size();
  auto add_row = [&](std::string predicate, FactId fact, bool diagnostic) {
    OracleRow row;
    row.predicate = std::move(predicate);
    row.fact = fact.label();
    row.diagnostic = diagnostic;
    const auto mask = std::uint64_t{1} << fact_bit(fact.kind, fact.v);
    bool found = false;
    for (const auto& [key, e] : all) {
      ++row.views;
      const bool comb = (e.combinatorial & mask) != 0;
      const bool sem = (e.semantic & mask) != 0;
      if (comb == sem) continue;
      ++row.disagreements;
      const bool earlier = !found || e.first_index < row.example_index ||
                           (e.first_index == row.example_index &&
                            std::pair(e.owner, e.time) < std::pair(row.example_owner, row.example_time));
      if (earlier) {
        found = true;
        row.example_index = e.first_index;
        row.example_owner = e.owner;
        row.example_time = e.time;
        row.combinatorial_value = comb;
      }
    }
    out.rows.push_back(std::move(row));
  };
  for (Value v = 0; v < dom.value_count; ++v) {
    const std::string vs = std::to_string(v);
    add_row("K_exists(" + vs + ")", {FactKind::Exists, v}, false);
    add_row("K_exists_correct(" + vs + ")", {FactKind::ExistsCorrect, v}, false);
    add_row("K_exists_correct(" + vs + ")", {FactKind::ExistsCorrectEventually, v}, true);
  }
  if (dom.value_count == 2) {
    add_row("K_majority(0)", {FactKind::Maj, 0}, false);
    add_row("K_majority(1)", {FactKind::Maj, 1}, false);
  }
  add_row("not K_exists(0) and no hidden path", {FactKind::NeverKnown, 0}, false);
  return out;
}

std::vector<std::vector<int>> hidden_witnesses(const View& v, int c) {
  auto profile = hidden_profile(v);
  std::vector<std::vector<int>> out;
  for (Mask level : profile.hidden_by_level) {
    std::vector<int> row;
    for (Mask rest = level; rest != 0 && static_cast<int>(row.size()) < c; rest &= rest - 1) {
      row.push_back(std::countr_zero(rest));
    }
    out.push_back(std::move(row));
  }
  return out;
}

Adversary hidden_variant(const Adversary& adv, int i, int m, const std::vector<Value>& values) {
  const View base = view(adv, i, m);
  const int c = static_cast<int>(values.size());
  if (c > hidden_profile(base).capacity) {
    throw Error(ErrorCode::CapacityTooSmall, std::to_string(c) + " values exceed the hidden capacity");
  }
  if (c == 0) return adv;
  const auto w = hidden_witnesses(base, c);
  const int n = adv.n;

  std::vector<int> round(static_cast<std::size_t>(n), 0);
  std::vector<Mask> to(static_cast<std::size_t>(n), 0);
  for (const auto& cr : adv.pattern.crashes) {
    round[static_cast<std::size_t>(cr.process)] = cr.round;
    to[static_cast<std::size_t>(cr.process)] = cr.delivers_to;
  }
  Mask witnesses = 0;
  for (const auto& row : w) {
    for (int j : row) witnesses |= bit(j);
  }

  Adversary out = adv;
  for (int b = 0; b < c; ++b) out.values[static_cast<std::size_t>(w[0][static_cast<std::size_t>(b)])] = values[static_cast<std::size_t>(b)];
  // Non-witness crashers reach a level-l witness exactly when they reach i.
  for (int s = 0; s < n; ++s) {
    const int r = round[static_cast<std::size_t>(s)];
    if (has(witnesses, s) || r < 1 || r > m) continue;
    for (int j : w[static_cast<std::size_t>(r)]) {
      if (has(to[static_cast<std::size_t>(s)], i)) {
        to[static_cast<std::size_t>(s)] |= bit(j);
      } else {
        to[static_cast<std::size_t>(s)] &= ~bit(j);
      }
    }
  }
  for (int l = 0; l <= m; ++l) {
    for (int b = 0; b < c; ++b) {
      const int j = w[static_cast<std::size_t>(l)][static_cast<std::size_t>(b)];
      if (l < m) {
        round[static_cast<std::size_t>(j)] = l + 1;
        to[static_cast<std::size_t>(j)] = bit(w[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(b)]);
      } else if (round[static_cast<std::size_t>(j)] != 0 && round[static_cast<std::size_t>(j)] <= m) {
        round[static_cast<std::size_t>(j)] = m + 1;
        to[static_cast<std::size_t>(j)] = 0;
      }
    }
  }
  out.pattern.crashes.clear();
  for (int j = 0; j < n; ++j) {
    if (round[static_cast<std::size_t>(j)] != 0) {
      out.pattern.crashes.push_back({j, round[static_cast<std::size_t>(j)], to[static_cast<std::size_t>(j)]});
    }
  }
  if (out.failures() > adv.pattern.t) {
    throw Error(ErrorCode::CrashBudget, "construction needs " + std::to_string(out.failures()) + " crashes");
  }
  return out;
}

HiddenVariantCheck check_hidden_variant(const Adversary& adv, const Adversary& variant, int i, int m,
                                        const std::vector<Value>& values, int value_count) {
  HiddenVariantCheck out;
  try {
    validate_adversary(variant, value_count);
    out.valid = true;
  } catch (const Error&) {
    return out;
  }
  const View base = view(adv, i, m);
  CommunicationGraph g(variant, m);
  if (!has(g.active(m), i)) return out;
  out.view_preserved = g.view(i, m) == base;
  const int c = static_cast<int>(values.size());
  const auto w = hidden_witnesses(base, c);
  out.values_planted = out.others_known = out.witness_capacity = true;
  for (int l = 0; l <= m; ++l) {
    const Mask own = known_values(g.view(i, l)).vals;
    for (int b = 0; b < c; ++b) {
      const int j = w[static_cast<std::size_t>(l)][static_cast<std::size_t>(b)];
      if (!has(g.active(l), j)) {
        out.values_planted = false;
        continue;
      }
      const View wv = g.view(j, l);
      const Value vb = values[static_cast<std::size_t>(b)];
      const Mask vals = known_values(wv).vals;
      out.values_planted = out.values_planted && has(vals, vb);
      out.others_known = out.others_known && (vals & ~bit(vb) & ~own) == 0;
      out.witness_capacity = out.witness_capacity && hidden_profile(wv).capacity >= c - 1;
    }
  }
  return out;
}

HiddenVariantSweep hidden_variant_sweep(const EnumerationDomain& dom, int workers) {
  AdversarySpace space(dom);
  constexpr std::uint64_t kChunk = 256;
  struct Partial {
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;
    std::uint64_t index = 0;
    int owner = -1;
    int time = -1;
  };
  std::vector<Partial> partial(chunk_count(space.size(), kChunk));
  parallel_chunks(space.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    Partial& local = partial[chunk];
    Adversary a;
    CommunicationGraph g;
    View v;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      space.at_into(idx, a);
      g.assign(a, dom.horizon);
      for (int i = 0; i < dom.n; ++i) {
        for (int m = 0; m <= dom.horizon && has(g.active(m), i); ++m) {
          g.view_into(i, m, v);
          const int c = hidden_profile(v).capacity;
          if (c < 1) continue;
          std::vector<Value> full(static_cast<std::size_t>(c));
          for (int b = 0; b < c; ++b) {
            full[static_cast<std::size_t>(b)] =
                static_cast<Value>((idx + static_cast<std::uint64_t>(b)) % static_cast<std::uint64_t>(dom.value_count));
          }
          std::vector<Value> single{static_cast<Value>(dom.value_count - 1)};
          for (const std::vector<Value>* planted : {&full, &single}) {
            ++local.cases;
            bool ok = false;
            try {
              ok = check_hidden_variant(a, hidden_variant(a, i, m, *planted), i, m, *planted, dom.value_count).pass();
            } catch (const Error&) {
              ok = false;
            }
            if (!ok && local.failures++ == 0) {
              local.index = idx;
              local.owner = i;
              local.time = m;
            }
          }
        }
      }
    }
  });
  HiddenVariantSweep out;
  out.domain = dom;
  out.adversaries = space.size();
  for (const auto& p : partial) {
    out.cases += p.cases;
    if (p.failures > 0 && out.failures == 0) {
      out.example_index = p.index;
      out.example_owner = p.owner;
      out.example_time = p.time;
    }
    out.failures += p.failures;
  }
  return out;
}

}  // namespace unbeat
