#pragma once

// Small CDCL SAT solver: two watched literals, first-UIP learning, VSIDS,
// phase saving and Luby restarts. Literals are DIMACS-style: +v / -v, v >= 1.

#include <cstdint>
#include <vector>

namespace unbeat {

class SatSolver {
 public:
  enum class Result { Sat, Unsat, Unknown };

  int new_var();
  int variables() const { return static_cast<int>(assign_.size()); }
  std::size_t clauses() const { return clause_count_; }

  /// Clauses may only be added before solve().
  void add_clause(std::vector<int> lits);

  /// Unknown when more than `conflict_budget` conflicts were needed.
  Result solve(std::uint64_t conflict_budget);

  /// Model value of variable v (1-based) after Sat.
  bool value(int v) const { return model_[static_cast<std::size_t>(v - 1)] == kTrue; }

  std::uint64_t conflicts() const { return conflicts_; }
  std::uint64_t decisions() const { return decisions_; }

 private:
  using Lit = int;  // 2*var + (negated ? 1 : 0)
  static constexpr std::int8_t kTrue = 1;
  static constexpr std::int8_t kFalse = -1;
  static constexpr std::int8_t kUndef = 0;
  static constexpr int kNoReason = -1;

  static Lit neg(Lit p) { return p ^ 1; }
  static int var(Lit p) { return p >> 1; }
  std::int8_t lit_value(Lit p) const {
    const std::int8_t v = assign_[static_cast<std::size_t>(var(p))];
    return (p & 1) ? static_cast<std::int8_t>(-v) : v;
  }

  void enqueue(Lit p, int reason);
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learnt, int& back_level);
  void backtrack(int level);
  int attach(std::vector<Lit> lits);
  void bump(int v);
  int pick_branch();

  void heap_insert(int v);
  void heap_up(std::size_t pos);
  void heap_down(std::size_t pos);
  int heap_pop();

  std::vector<std::vector<Lit>> clause_lits_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> assign_;
  std::vector<std::int8_t> phase_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  std::vector<char> seen_;
  std::vector<std::int8_t> model_;
  bool root_conflict_ = false;
  std::size_t clause_count_ = 0;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
};

}  // namespace unbeat
