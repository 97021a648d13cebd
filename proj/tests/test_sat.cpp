#include <gtest/gtest.h>

#include <random>

#include "unbeat/sat.hpp"

using namespace unbeat;

namespace {

bool satisfies(const std::vector<std::vector<int>>& cnf, std::uint32_t assignment) {
  for (const auto& c : cnf) {
    bool ok = false;
    for (int l : c) {
      const bool v = (assignment >> (std::abs(l) - 1)) & 1U;
      if ((l > 0) == v) ok = true;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

TEST(Sat, EmptyClauseIsUnsat) {
  SatSolver s;
  const int a = s.new_var();
  s.add_clause({a});
  s.add_clause({-a});
  EXPECT_EQ(s.solve(100), SatSolver::Result::Unsat);
}

TEST(Sat, PigeonholeFiveIntoFour) {
  SatSolver s;
  const int pigeons = 5, holes = 4;
  std::vector<std::vector<int>> x(pigeons, std::vector<int>(holes));
  for (auto& row : x)
    for (auto& v : row) v = s.new_var();
  for (const auto& row : x) s.add_clause(row);
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) s.add_clause({-x[p][h], -x[q][h]});
  EXPECT_EQ(s.solve(1000000), SatSolver::Result::Unsat);
}

TEST(Sat, BudgetYieldsUnknown) {
  SatSolver s;
  const int pigeons = 9, holes = 8;
  std::vector<std::vector<int>> x(pigeons, std::vector<int>(holes));
  for (auto& row : x)
    for (auto& v : row) v = s.new_var();
  for (const auto& row : x) s.add_clause(row);
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) s.add_clause({-x[p][h], -x[q][h]});
  EXPECT_EQ(s.solve(10), SatSolver::Result::Unknown);
}

TEST(Sat, RandomThreeSatMatchesBruteForce) {
  std::mt19937 rng(7);
  const int vars = 12;
  int sat = 0, unsat = 0;
  for (int round = 0; round < 300; ++round) {
    std::vector<std::vector<int>> cnf;
    const int count = 40 + static_cast<int>(rng() % 20);
    for (int c = 0; c < count; ++c) {
      std::vector<int> clause;
      for (int k = 0; k < 3; ++k) {
        const int v = 1 + static_cast<int>(rng() % vars);
        clause.push_back((rng() & 1U) ? v : -v);
      }
      cnf.push_back(clause);
    }
    bool expected = false;
    for (std::uint32_t a = 0; a < (1U << vars) && !expected; ++a) expected = satisfies(cnf, a);

    SatSolver s;
    for (int v = 0; v < vars; ++v) s.new_var();
    for (const auto& c : cnf) s.add_clause(c);
    const auto r = s.solve(1000000);
    ASSERT_EQ(r == SatSolver::Result::Sat, expected) << "round " << round;
    if (r == SatSolver::Result::Sat) {
      std::uint32_t model = 0;
      for (int v = 1; v <= vars; ++v)
        if (s.value(v)) model |= 1U << (v - 1);
      EXPECT_TRUE(satisfies(cnf, model));
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 20);
  EXPECT_GT(unsat, 20);
}
