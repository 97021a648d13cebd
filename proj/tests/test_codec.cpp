#include <gtest/gtest.h>

#include "support.hpp"
#include "unbeat/codec.hpp"
#include "unbeat/errors.hpp"

using namespace unbeat;
using namespace unbeat::testing;

TEST(Wire, FieldWidths) {
  auto f = WireFormat::make(4, 2, 3);
  EXPECT_EQ(f.id_bits, 2);
  EXPECT_EQ(f.value_bits, 1);
  EXPECT_EQ(f.round_bits, 2);
  auto g = WireFormat::make(32, 3, 32);
  EXPECT_EQ(g.id_bits, 5);
  EXPECT_EQ(g.value_bits, 2);
  EXPECT_EQ(g.round_bits, 6);
}

TEST(Wire, AliveIsTwoBits) {
  auto f = WireFormat::make(4, 2, 3);
  const std::vector<int> none(4, 0);
  auto bits = encode_reports(f, {}, none);
  EXPECT_EQ(bits.size(), 2U);
  auto back = decode_reports(f, bits, none);
  ASSERT_EQ(back.size(), 1U);
  EXPECT_EQ(back[0].kind, ReportKind::Alive);
}

TEST(Wire, RoundTrip) {
  auto f = WireFormat::make(5, 3, 4);
  std::vector<int> prior{0, 0, 3, 0, 0};
  std::vector<Report> reports{{ReportKind::Value, 4, 2, false},
                              {ReportKind::Value, 0, 1, false},
                              {ReportKind::FailedAt, 1, 4, false},
                              {ReportKind::FailedAt, 3, 2, true},
                              {ReportKind::FailedAt, 2, 2, true}};
  auto bits = encode_reports(f, reports, prior);
  // 2 values (2+3+2) + first failure reports (2+3+3+1) x2 + second report (2+3+1) + END
  EXPECT_EQ(bits.size(), 14U + 18U + 6U + 2U);
  EXPECT_EQ(decode_reports(f, bits, prior), reports);
}

TEST(Wire, MalformedInput) {
  auto f = WireFormat::make(3, 2, 2);
  const std::vector<int> none(3, 0);
  EXPECT_THROW(decode_reports(f, Bits{false}, none), Error);
  auto bits = encode_reports(f, {{ReportKind::Value, 1, 1, false}}, none);
  bits.pop_back();
  EXPECT_THROW(decode_reports(f, bits, none), Error);
  EXPECT_THROW(encode_reports(f, {{ReportKind::FailedAt, 1, 1, false}}, {0, 2, 0}), Error);
}

TEST(Engine, FirstRoundSendsOwnValueOnly) {
  auto a = make_adversary(2, {0, 1, 1, 0});
  CompactEngine engine(a, 3, 2);
  const auto f = WireFormat::make(4, 2, 3);
  for (int s = 0; s < 4; ++s) {
    auto bits = engine.encode_round(s);
    auto reports = decode_reports(f, bits, std::vector<int>(4, 0));
    ASSERT_EQ(reports.size(), 1U);
    EXPECT_EQ(reports[0].kind, ReportKind::Value);
    EXPECT_EQ(*reports[0].subject, s);
  }
}

TEST(Engine, FailureFreeRoundIsAlive) {
  auto a = make_adversary(1, {0, 1, 1});
  CompactEngine engine(a, 3, 2);
  engine.step();  // values
  engine.step();  // relayed values
  const auto before = engine.bits(0, 1);
  engine.step();
  EXPECT_EQ(engine.bits(0, 1) - before, 2U);
}

TEST(Engine, SeparatingScenarioStillDecidesAtTwo) {
  auto a = make_adversary(2, {1, 1, 1, 1}, {crash(2, 1, {3}), crash(4, 2)});
  auto s = decode_and_decide({ProtocolId::Opt0, std::nullopt, 2, 2, 4}, a, 3, true);
  ASSERT_TRUE(s.decisions[0]);
  EXPECT_EQ(*s.decisions[0], (Decision{2, 1}));
}

TEST(Engine, KnowledgeMatchesFullInformation) {
  auto a = make_adversary(2, {0, 1, 1, 0}, {crash(1, 1, {2}), crash(3, 2, {4})});
  CompactEngine engine(a, 3, 2, true, true);
  engine.run();
  for (int i = 0; i < 4; ++i) {
    for (int m = 0; m <= 3 && active_at(a, i, m); ++m) {
      ASSERT_NE(engine.knowledge(i, m), nullptr);
      EXPECT_EQ(*engine.knowledge(i, m), summarize(view(a, i, m)));
    }
  }
  EXPECT_EQ(engine.knowledge(0, 1), nullptr);
}

TEST(Engine, EquivalentOnSmallDomains) {
  for (auto dom : {EnumerationDomain::standard(2, 1, 2), EnumerationDomain::standard(3, 1, 2),
                   EnumerationDomain::standard(3, 2, 2), EnumerationDomain::standard(3, 2, 3),
                   EnumerationDomain::standard(4, 1, 3)}) {
    auto sweep = codec_sweep(dom, codec_protocols(dom), 4);
    EXPECT_TRUE(sweep.pass()) << dom.n << " " << dom.t << " " << dom.value_count;
    EXPECT_EQ(sweep.adversaries, adversary_count(dom));
  }
}

TEST(Engine, ProtocolListCoversKValues) {
  auto list = codec_protocols(EnumerationDomain::standard(3, 1, 3));
  int k_protocols = 0;
  for (const auto& p : list) {
    if (p.k) ++k_protocols;
  }
  EXPECT_EQ(list.size(), 5U);  // OPT_MIN plus two k each for OPT_MIN_K, U_PROT_MIN_K
  EXPECT_EQ(k_protocols, 4);
}

TEST(BitBudget, SmallSampleWithinBound) {
  for (int n : {8, 16}) {
    auto check = bit_budget_check(n, 100, 99, 4);
    EXPECT_TRUE(check.pass()) << n << ": " << check.max_pair_bits << " > " << check.budget;
    EXPECT_GT(check.max_pair_bits, 0U);
  }
}

TEST(BitBudget, IndependentOfWorkers) {
  auto one = bit_budget_check(8, 64, 5, 1);
  auto many = bit_budget_check(8, 64, 5, 8);
  EXPECT_EQ(one.max_pair_bits, many.max_pair_bits);
  EXPECT_EQ(one.max_failed_reports, many.max_failed_reports);
}

TEST(RandomAdversary, RespectsBounds) {
  std::mt19937_64 rng(1);
  for (int s = 0; s < 200; ++s) {
    auto a = random_adversary(6, 3, 2, 4, rng);
    EXPECT_NO_THROW(validate_adversary(a, 2));
    for (const auto& c : a.pattern.crashes) EXPECT_LE(c.round, 5);
  }
}
