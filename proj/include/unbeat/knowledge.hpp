#pragma once

// Combinatorial epistemic predicates computed from a single view.

#include <optional>
#include <vector>

#include "unbeat/model.hpp"

namespace unbeat {

/// Values v with K_i∃v (bit v set), their minimum and the low ones (< k).
struct KnownValueSet {
  Mask vals = 0;
  std::optional<Value> min;
  Mask lows = 0;

  std::vector<Value> list() const;
  bool operator==(const KnownValueSet&) const = default;
};

KnownValueSet known_values(const View& view, std::optional<int> k = std::nullopt);

/// <j,level> is hidden from the view's owner: it is not seen and no seen node
/// <j',l'> with l' <= level misses j's round-l' message.
bool hidden(const View& view, int j, int level);

struct HiddenProfile {
  std::vector<Mask> hidden_by_level;
  int capacity = 0;

  bool operator==(const HiddenProfile&) const = default;
};

HiddenProfile hidden_profile(const View& view);

/// Literal: a hidden node at every level 0..m. BeforeNow: a hidden node at
/// every level l < m (the weaker reading; kept to exhibit where they differ).
enum class HiddenPathRule { Literal, BeforeNow };

bool hidden_path_exists(const View& view, HiddenPathRule rule = HiddenPathRule::Literal);

struct FailureKnowledge {
  /// Least c such that the view proves j inactive at time c; 0 when unproven.
  std::vector<int> known_crashed_by;
  /// Processes j != owner whose round-m message the owner did not receive.
  int knownf = 0;

  Mask crashed() const;
  bool operator==(const FailureKnowledge&) const = default;
};

FailureKnowledge failure_knowledge(const View& view);

/// K_i∃correct(v). `prev` must be the owner's view one step earlier (null at
/// time 0); throws Error{MismatchedViews} otherwise.
bool knows_exists_correct(const View& now, const View* prev, Value v, int t);

/// K_i(Maj=v) for binary values. Throws Error{NonBinaryTask}.
bool knows_majority(const View& view, Value v, int n);

/// 0 iff strictly more than half of the known initial values are 0.
Value maj_vals(const View& view);

/// Everything the decision rules consume, extracted once per node. The
/// compact message engine rebuilds the same structure from reports.
struct Knowledge {
  Node owner;
  int n = 0;
  Mask vals = 0;
  std::vector<int> initial;          // -1 when <j,0> is unseen
  std::vector<Mask> hidden_by_level;  // 0..m
  int capacity = 0;
  int knownf = 0;
  std::vector<int> crashed_by;  // 0 when unproven
  Mask crashed = 0;
  /// Processes j with <j,m-1> seen (the round-m senders, owner included).
  Mask witnesses = 0;
  /// Known-value set of <j,m-1> for each witness j.
  std::vector<Mask> witness_vals;

  int time() const { return owner.time; }
  Value min_value() const;
  bool low(int k) const { return (vals & (bit(k) - 1)) != 0; }
  bool hidden_path() const { return capacity >= 1; }

  bool operator==(const Knowledge&) const = default;
};

void summarize_into(const View& view, Knowledge& out);
Knowledge summarize(const View& view);

bool knows_exists_correct(const Knowledge& now, Value v, int t);
bool knows_majority(const Knowledge& now, Value v);
Value maj_vals(const Knowledge& now);

}  // namespace unbeat
