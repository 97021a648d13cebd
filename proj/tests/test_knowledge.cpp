#include <gtest/gtest.h>

#include "support.hpp"
#include "unbeat/domain.hpp"
#include "unbeat/errors.hpp"
#include "unbeat/knowledge.hpp"

using namespace unbeat;
using namespace unbeat::testing;

namespace {

// n=10, t=6. Owner 1. For b = 1..3, a_b = 1+b crashes in round 1 reaching only
// b_b = 4+b, which crashes in round 2 reaching only c_b = 7+b.
Adversary figure_one() {
  std::vector<Crash> crashes;
  for (int b = 1; b <= 3; ++b) {
    crashes.push_back(crash(1 + b, 1, {4 + b}));
    crashes.push_back(crash(4 + b, 2, {7 + b}));
  }
  return make_adversary(6, std::vector<Value>(10, 1), crashes);
}

}  // namespace

TEST(KnownValues, OwnValueAtTimeZero) {
  auto a = make_adversary(1, {0, 1, 2});
  auto kv = known_values(view(a, 2, 0), 2);
  EXPECT_EQ(kv.vals, bit(2));
  EXPECT_EQ(kv.min, 2);
  EXPECT_EQ(kv.lows, 0U);
  EXPECT_EQ(kv.list(), std::vector<Value>{2});
}

TEST(KnownValues, FailureFreeRoundOneSeesAll) {
  auto a = make_adversary(1, {0, 1, 2});
  auto kv = known_values(view(a, 2, 1), 2);
  EXPECT_EQ(kv.vals, bit(0) | bit(1) | bit(2));
  EXPECT_EQ(kv.min, 0);
  EXPECT_EQ(kv.lows, bit(0) | bit(1));
}

TEST(Hidden, OwnerNeverHidden) {
  auto a = make_adversary(1, {1, 1, 1});
  for (int l = 0; l <= 2; ++l) EXPECT_FALSE(hidden(view(a, 0, 2), 0, l));
}

TEST(Hidden, FailureFreeOwnLevel) {
  auto v = view(make_adversary(1, {1, 1, 1}), 0, 1);
  EXPECT_TRUE(hidden(v, 1, 1));
  EXPECT_FALSE(hidden(v, 1, 0));
}

TEST(Hidden, SilenceProvesCrash) {
  auto v = view(make_adversary(1, {1, 1}, {crash(2, 1)}), 0, 1);
  EXPECT_TRUE(hidden(v, 1, 0));
  EXPECT_FALSE(hidden(v, 1, 1));
}

TEST(HiddenProfile, Boundaries) {
  auto a = make_adversary(2, {1, 1, 1, 1});
  EXPECT_EQ(hidden_profile(view(a, 0, 0)).capacity, 3);
  auto p = hidden_profile(view(a, 0, 1));
  EXPECT_EQ(p.hidden_by_level[0], 0U);
  EXPECT_EQ(p.capacity, 0);
}

TEST(HiddenProfile, FigureOneHasCapacityThree) {
  auto a = figure_one();
  validate_adversary(a, 2);
  auto v = view(a, 0, 2);
  auto p = hidden_profile(v);
  EXPECT_EQ(p.capacity, 3);
  EXPECT_EQ(p.hidden_by_level[0], ids({2, 3, 4}));
  EXPECT_EQ(p.hidden_by_level[1], ids({5, 6, 7}));
  EXPECT_EQ(p.hidden_by_level[2], ids({8, 9, 10}));
  for (int b = 1; b <= 3; ++b) {
    EXPECT_FALSE(v.sees({b, 0}));
    EXPECT_FALSE(v.sees({3 + b, 1}));
  }
}

TEST(HiddenPath, LiteralAndBeforeNowReadings) {
  auto a = make_adversary(1, {1, 1});
  EXPECT_TRUE(hidden_path_exists(view(a, 0, 0)));
  EXPECT_FALSE(hidden_path_exists(view(make_adversary(1, {1, 1, 1}), 0, 1)));
  auto v = view(make_adversary(1, {1, 1}, {crash(2, 1)}), 0, 1);
  EXPECT_FALSE(hidden_path_exists(v, HiddenPathRule::Literal));
  EXPECT_TRUE(hidden_path_exists(v, HiddenPathRule::BeforeNow));
}

TEST(HiddenPath, EqualsPositiveCapacityAndIndependentLevelSearch) {
  AdversarySpace space({3, 2, 2, 3});
  for (std::uint64_t idx = 0; idx < space.size(); ++idx) {
    auto a = space.at(idx);
    for (int i = 0; i < 3; ++i) {
      for (int m = 0; m <= 3 && active_at(a, i, m); ++m) {
        auto v = view(a, i, m);
        bool every_level = true;
        for (int l = 0; l <= m; ++l) {
          bool any = false;
          for (int j = 0; j < 3; ++j) any = any || hidden(v, j, l);
          every_level = every_level && any;
        }
        ASSERT_EQ(hidden_path_exists(v), every_level);
        ASSERT_EQ(hidden_path_exists(v), hidden_profile(v).capacity >= 1);
      }
    }
  }
}

TEST(HiddenProfile, CapacityWeaklyDecreases) {
  AdversarySpace space({4, 2, 2, 3});
  for (std::uint64_t idx = 0; idx < space.size(); idx += 3) {
    auto a = space.at(idx);
    CommunicationGraph g(a, 3);
    for (int i = 0; i < 4; ++i) {
      for (int m = 1; m <= 3 && has(g.active(m), i); ++m) {
        ASSERT_LE(hidden_profile(g.view(i, m)).capacity, hidden_profile(g.view(i, m - 1)).capacity);
      }
    }
  }
}

TEST(FailureKnowledge, Examples) {
  auto ff = failure_knowledge(view(make_adversary(1, {1, 1, 1}), 0, 2));
  EXPECT_EQ(ff.knownf, 0);
  EXPECT_EQ(ff.crashed(), 0U);
  auto a = make_adversary(2, {1, 0, 1, 1}, {crash(2, 1, {3})});
  EXPECT_EQ(failure_knowledge(view(a, 0, 1)).knownf, 1);
  auto two = failure_knowledge(view(a, 0, 2));
  EXPECT_EQ(two.knownf, 1);
  EXPECT_EQ(two.known_crashed_by[1], 1);
  EXPECT_EQ(two.crashed(), ids({2}));
}

TEST(KnowsExistsCorrect, ZeroThresholdReducesToKnownValues) {
  auto a = make_adversary(0, {0, 1, 1});
  auto now = view(a, 1, 1);
  auto prev = view(a, 1, 0);
  EXPECT_TRUE(knows_exists_correct(now, &prev, 0, 0));
  EXPECT_FALSE(knows_exists_correct(prev, nullptr, 0, 0));
  EXPECT_TRUE(knows_exists_correct(prev, nullptr, 1, 0));
}

TEST(KnowsExistsCorrect, NothingAtTimeZero) {
  auto a = make_adversary(1, {0, 1, 1});
  EXPECT_FALSE(knows_exists_correct(view(a, 0, 0), nullptr, 0, 1));
}

TEST(KnowsExistsCorrect, SingleCrashedSenderIsNotEnough) {
  auto a = make_adversary(2, {1, 0, 1, 1}, {crash(2, 1, {1})});
  auto now = view(a, 0, 1);
  auto prev = view(a, 0, 0);
  EXPECT_TRUE(has(known_values(now).vals, 0));
  EXPECT_EQ(failure_knowledge(now).knownf, 0);
  EXPECT_FALSE(knows_exists_correct(now, &prev, 0, 2));
  auto later = view(a, 0, 2);
  EXPECT_TRUE(knows_exists_correct(later, &now, 0, 2));
}

TEST(KnowsExistsCorrect, RejectsMismatchedPredecessor) {
  auto a = make_adversary(1, {0, 1, 1});
  auto now = view(a, 0, 1);
  auto other = view(a, 1, 0);
  EXPECT_THROW(knows_exists_correct(now, &other, 0, 1), Error);
  EXPECT_THROW(knows_exists_correct(now, nullptr, 0, 1), Error);
}

TEST(KnowsMajority, Thresholds) {
  auto a = make_adversary(1, {0, 0, 1});
  EXPECT_FALSE(knows_majority(view(a, 0, 0), 0, 3));
  EXPECT_FALSE(knows_majority(view(a, 2, 0), 1, 3));
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(knows_majority(view(a, i, 1), 0, 3));
  EXPECT_TRUE(knows_majority(view(make_adversary(1, {1, 0}), 0, 0), 1, 2));
  EXPECT_THROW(knows_majority(view(a, 0, 0), 2, 3), Error);
}

TEST(MajVals, StrictHalf) {
  EXPECT_EQ(maj_vals(view(make_adversary(1, {0, 0, 1}), 0, 1)), 0);
  EXPECT_EQ(maj_vals(view(make_adversary(1, {0, 1}), 0, 1)), 1);
  EXPECT_EQ(maj_vals(view(make_adversary(1, {1, 0}), 0, 0)), 1);
}

TEST(Summary, AgreesWithViewPredicates) {
  AdversarySpace space({3, 2, 3, 3});
  for (std::uint64_t idx = 0; idx < space.size(); idx += 5) {
    auto a = space.at(idx);
    CommunicationGraph g(a, 3);
    for (int i = 0; i < 3; ++i) {
      for (int m = 0; m <= 3 && has(g.active(m), i); ++m) {
        auto now = g.view(i, m);
        auto k = summarize(now);
        ASSERT_EQ(k.vals, known_values(now).vals);
        ASSERT_EQ(k.capacity, hidden_profile(now).capacity);
        ASSERT_EQ(k.knownf, failure_knowledge(now).knownf);
        ASSERT_EQ(k.crashed_by, failure_knowledge(now).known_crashed_by);
        for (Value v = 0; v < 3; ++v) {
          std::optional<View> prev;
          if (m > 0) prev = g.view(i, m - 1);
          ASSERT_EQ(knows_exists_correct(k, v, 2), knows_exists_correct(now, prev ? &*prev : nullptr, v, 2));
        }
      }
    }
  }
}
