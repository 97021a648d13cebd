#include <gtest/gtest.h>

#include <set>

#include "support.hpp"
#include "unbeat/domain.hpp"
#include "unbeat/errors.hpp"
#include "unbeat/model.hpp"

using namespace unbeat;
using namespace unbeat::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ParseError;
}

std::set<Node> seen_set(const View& v) {
  auto nodes = v.seen_nodes();
  return {nodes.begin(), nodes.end()};
}

}  // namespace

TEST(ValidateAdversary, AcceptsEmptyPattern) {
  EXPECT_NO_THROW(validate_adversary(make_adversary(1, {0, 1, 1}), 2));
}

TEST(ValidateAdversary, RejectsTooManyCrashes) {
  auto a = make_adversary(1, {0, 1, 1}, {crash(1, 1), crash(2, 1)});
  EXPECT_EQ(code_of([&] { validate_adversary(a, 2); }), ErrorCode::TooManyCrashes);
}

TEST(ValidateAdversary, AcceptsSingleCrashWithDelivery) {
  EXPECT_NO_THROW(validate_adversary(make_adversary(2, {1, 0, 1, 1}, {crash(2, 1, {3})}), 2));
}

TEST(ValidateAdversary, RejectsEachInvariant) {
  EXPECT_EQ(code_of([] { validate_adversary(make_adversary(2, {0, 1, 1}, {crash(1, 1), crash(1, 2)}), 2); }),
            ErrorCode::DuplicateCrash);
  EXPECT_EQ(code_of([] { validate_adversary(make_adversary(1, {0, 2, 1}), 2); }), ErrorCode::ValueOutOfRange);
  EXPECT_EQ(code_of([] { validate_adversary(make_adversary(1, {0, 1, 1}, {crash(1, 1, {1})}), 2); }),
            ErrorCode::SelfDelivery);
}

TEST(ActiveAt, CrashRoundSemantics) {
  auto free = make_adversary(1, {0, 0});
  for (int m = 0; m < 5; ++m) EXPECT_TRUE(active_at(free, 0, m));
  auto early = make_adversary(1, {0, 0}, {crash(1, 1)});
  EXPECT_TRUE(active_at(early, 0, 0));
  EXPECT_FALSE(active_at(early, 0, 1));
  auto late = make_adversary(1, {0, 0}, {crash(1, 3)});
  EXPECT_TRUE(active_at(late, 0, 2));
  EXPECT_FALSE(active_at(late, 0, 3));
}

TEST(Seen, EmptyChainAndFullDelivery) {
  auto a = make_adversary(1, {0, 1, 1});
  EXPECT_TRUE(seen(a, {1, 1}, {1, 1}));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_TRUE(seen(a, {j, 0}, {i, 1}));
  }
}

TEST(Seen, RelayedThroughSingleRecipient) {
  auto a = make_adversary(2, {1, 0, 1, 1}, {crash(2, 1, {3})});
  EXPECT_TRUE(seen(a, {1, 0}, {0, 2}));
  EXPECT_FALSE(seen(a, {1, 0}, {0, 1}));
}

TEST(Seen, RejectsNonexistentNodes) {
  auto a = make_adversary(1, {0, 1}, {crash(2, 1)});
  EXPECT_EQ(code_of([&] { (void)seen(a, {1, 1}, {0, 2}); }), ErrorCode::NonexistentNode);
}

TEST(View, BaseAndFailureFree) {
  auto a = make_adversary(1, {0, 1, 1});
  auto v0 = view(a, 1, 0);
  EXPECT_EQ(seen_set(v0), (std::set<Node>{{1, 0}}));
  EXPECT_EQ(v0.initial_value(1), 1);
  EXPECT_FALSE(v0.initial_value(0));
  auto v1 = view(a, 1, 1);
  EXPECT_EQ(seen_set(v1), (std::set<Node>{{0, 0}, {1, 0}, {2, 0}, {1, 1}}));
  EXPECT_EQ(v1.edges().size(), 3U);
}

TEST(View, InactiveOwnerThrows) {
  auto a = make_adversary(1, {0, 1}, {crash(2, 1)});
  EXPECT_EQ(code_of([&] { (void)view(a, 1, 1); }), ErrorCode::InactiveProcess);
}

TEST(View, MatchesForwardReferenceOnWholeDomain) {
  AdversarySpace space({3, 2, 2, 3});
  for (std::uint64_t idx = 0; idx < space.size(); idx += 7) {
    auto a = space.at(idx);
    for (int i = 0; i < 3; ++i) {
      for (int m = 0; m <= 3 && active_at(a, i, m); ++m) {
        ASSERT_EQ(seen_set(view(a, i, m)), reference_seen(a, i, m)) << "index " << idx;
      }
    }
  }
}

TEST(View, MonotoneAndCarriesActiveSenders) {
  AdversarySpace space({4, 2, 2, 3});
  for (std::uint64_t idx = 0; idx < space.size(); idx += 13) {
    auto a = space.at(idx);
    CommunicationGraph g(a, 3);
    for (int i = 0; i < 4; ++i) {
      for (int m = 1; m <= 3 && active_at(a, i, m); ++m) {
        auto now = g.view(i, m);
        auto before = g.view(i, m - 1);
        for (int l = 0; l < m; ++l) ASSERT_EQ(before.seen_at(l) & ~now.seen_at(l), 0U);
        ASSERT_EQ(now.seen_at(m - 1) & g.active(m), g.active(m));
      }
    }
  }
}

TEST(View, FingerprintSeparatesDistinctViews) {
  auto a = make_adversary(1, {0, 1, 1});
  auto b = make_adversary(1, {1, 1, 1});
  EXPECT_NE(view(a, 1, 1).fingerprint(), view(b, 1, 1).fingerprint());
  EXPECT_EQ(view(a, 1, 0).fingerprint(), view(b, 1, 0).fingerprint());
}

TEST(Simulate, DecisionRuleIsRecordedOnce) {
  auto a = make_adversary(1, {0, 1, 1}, {crash(1, 1)});
  int calls = 0;
  DecisionRule rule = [&](const View& now, const View*) -> std::optional<Value> {
    ++calls;
    if (now.time() == 1) return 7;
    return std::nullopt;
  };
  auto s = simulate(rule, a, 2);
  EXPECT_FALSE(s.decisions[0]);
  EXPECT_EQ(s.decisions[1], (Decision{1, 7}));
  EXPECT_EQ(s.crash_round[0], 1);
  EXPECT_EQ(calls, 1 + 2 + 2);
}
