#pragma once

// Synchronous crash-failure model: adversaries, communication graphs and
// per-node views of a full-information protocol.
//
// Process indices are 0-based inside the library (0..n-1). The JSON adversary
// format and all CLI output use 1-based ids.

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace unbeat {

using Mask = std::uint64_t;
using Value = int;

inline constexpr int kMaxProcesses = 64;

constexpr Mask bit(int i) { return Mask{1} << i; }
constexpr Mask all_processes(int n) { return n >= 64 ? ~Mask{0} : bit(n) - 1; }
constexpr bool has(Mask m, int i) { return (m >> i) & 1U; }
constexpr int popcount(Mask m) { return std::popcount(m); }

/// Process `process` crashes in round `round` (>= 1): it behaves correctly in
/// rounds < round, its round-`round` messages reach exactly `delivers_to`, and
/// it is silent afterwards. Nodes <process,0>..<process,round-1> exist.
struct Crash {
  int process = 0;
  int round = 1;
  Mask delivers_to = 0;

  bool operator==(const Crash&) const = default;
};

struct FailurePattern {
  std::vector<Crash> crashes;
  int t = 0;

  bool operator==(const FailurePattern&) const = default;
};

/// The sole source of nondeterminism: initial values plus a failure pattern.
struct Adversary {
  int n = 2;
  std::vector<Value> values;
  FailurePattern pattern;

  /// Crash round of process j, or 0 when j never crashes.
  int crash_round(int j) const;
  int failures() const { return static_cast<int>(pattern.crashes.size()); }
  Mask faulty() const;
  Mask correct() const { return all_processes(n) & ~faulty(); }

  bool operator==(const Adversary&) const = default;
};

struct Node {
  int process = 0;
  int time = 0;

  bool operator==(const Node&) const = default;
  auto operator<=>(const Node&) const = default;
};

/// Throws Error{TooManyCrashes, DuplicateCrash, ValueOutOfRange, SelfDelivery,
/// InvalidAdversary} when an invariant of the adversary does not hold.
void validate_adversary(const Adversary& adv, int value_count);

/// True iff process i exists as a node at time m.
bool active_at(const Adversary& adv, int i, int m);

class CommunicationGraph;

/// The labelled communication subgraph G(i,m): every node with a message
/// chain to the owner, the delivered edges among them and the initial values
/// of the seen level-0 nodes.
class View {
 public:
  View() = default;

  Node owner() const { return {owner_, time_}; }
  int n() const { return n_; }
  int time() const { return time_; }

  /// Processes j such that <j,level> is seen.
  Mask seen_at(int level) const { return seen_[static_cast<std::size_t>(level)]; }
  bool sees(Node node) const {
    return node.time >= 0 && node.time <= time_ && has(seen_at(node.time), node.process);
  }
  /// Senders whose round-`level` message reached the seen node <j,level>
  /// (including j itself). Zero for unseen nodes and for level 0.
  Mask in_edges(int level, int j) const {
    return level == 0 ? 0 : in_[static_cast<std::size_t>(level * n_ + j)];
  }
  std::optional<Value> initial_value(int j) const {
    auto v = initial_[static_cast<std::size_t>(j)];
    return v < 0 ? std::nullopt : std::optional<Value>(v);
  }

  std::vector<Node> seen_nodes() const;
  std::vector<std::pair<Node, Node>> edges() const;

  /// Canonical serialization of (owner, seen nodes, edges, initial values).
  /// Equal fingerprints denote the same information state.
  std::string fingerprint() const;

  bool operator==(const View&) const = default;

 private:
  friend class CommunicationGraph;

  int n_ = 0;
  int owner_ = 0;
  int time_ = 0;
  std::vector<Mask> seen_;
  std::vector<Mask> in_;
  std::vector<std::int8_t> initial_;
};

/// Delivery structure of one adversary up to a depth: `received(l, j)` is the
/// set of senders whose round-l message reached j (self included while j is
/// active). Views are cut out of it by backward closure.
class CommunicationGraph {
 public:
  CommunicationGraph() = default;
  CommunicationGraph(const Adversary& adv, int depth) { assign(adv, depth); }

  void assign(const Adversary& adv, int depth);

  int n() const { return n_; }
  int depth() const { return depth_; }
  Mask active(int m) const { return active_[static_cast<std::size_t>(m)]; }
  Mask received(int round, int j) const {
    return recv_[static_cast<std::size_t>(round * n_ + j)];
  }

  /// Throws Error{InactiveProcess} when i does not exist at time m.
  View view(int i, int m) const;
  void view_into(int i, int m, View& out) const;

 private:
  int n_ = 0;
  int depth_ = 0;
  std::vector<Mask> active_;
  std::vector<Mask> recv_;
  std::vector<Value> values_;
};

/// True iff a message chain leads from src to dst. Throws
/// Error{NonexistentNode} when either node does not exist.
bool seen(const Adversary& adv, Node src, Node dst);

View view(const Adversary& adv, int i, int m);

struct Decision {
  int time = 0;
  Value value = 0;

  bool operator==(const Decision&) const = default;
};

struct DecisionSchedule {
  int n = 0;
  int horizon = 0;
  std::vector<std::optional<Decision>> decisions;
  std::vector<std::optional<int>> crash_round;

  int last_decision_time(Mask among) const;
  bool operator==(const DecisionSchedule&) const = default;
};

/// A decision rule of a full-information protocol: view now, and the same
/// process's view one step earlier (null at time 0).
using DecisionRule = std::function<std::optional<Value>(const View& now, const View* prev)>;

/// Runs the rule at every node <i,m>, m <= horizon, while i is active and
/// undecided, recording the first decision only.
DecisionSchedule simulate(const DecisionRule& rule, const Adversary& adv, int horizon);

/// Empty schedule with crash metadata filled in.
DecisionSchedule empty_schedule(const Adversary& adv, int horizon);

}  // namespace unbeat
