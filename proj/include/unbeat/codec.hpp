#pragma once

// Compact messaging: processes exchange VALUE / FAILED_AT / ALIVE reports
// instead of full views and rebuild the decision-relevant knowledge from them.
//
// Wire format, MSB first. A message is either the single code ALIVE, or a
// list of reports closed by END. Codes are 2 bits:
//   00 VALUE     subject, value
//   01 FAILED_AT subject, then round and witnessed flag on the sender's first
//                report about the subject; on the second report one bit
//                "round decreased by one" (the flag is then always set)
//   10 ALIVE
//   11 END
// Subjects use ceil(log2 n) bits, values ceil(log2 |V|), rounds
// ceil(log2(horizon+1)).

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "unbeat/domain.hpp"
#include "unbeat/knowledge.hpp"
#include "unbeat/model.hpp"
#include "unbeat/protocols.hpp"

namespace unbeat {

/// Declared constant of the per-pair bit bound C * n * log2(n).
inline constexpr int kCodecConstant = 8;

double codec_bit_budget(int n);

enum class ReportKind { Value, FailedAt, Alive };

/// VALUE(subject, payload=value), FAILED_AT(subject, payload=round,
/// witnessed), ALIVE. `witnessed` states that the reporter has seen
/// <subject, round-1>; otherwise its latest seen node of subject is at level
/// round-2.
struct Report {
  ReportKind kind = ReportKind::Alive;
  std::optional<int> subject;
  std::optional<int> payload;
  bool witnessed = false;

  bool operator==(const Report&) const = default;
};

struct WireFormat {
  int n = 2;
  int value_count = 2;
  int horizon = 1;
  int id_bits = 1;
  int value_bits = 1;
  int round_bits = 1;

  static WireFormat make(int n, int value_count, int horizon);
};

using Bits = std::vector<bool>;

/// `prior_failed[j]` is the round of the sender's previous FAILED_AT about j
/// (0 when none); receivers hold the same record since they got every earlier
/// message of the sender.
Bits encode_reports(const WireFormat& fmt, const std::vector<Report>& reports, const std::vector<int>& prior_failed);
std::vector<Report> decode_reports(const WireFormat& fmt, const Bits& bits, const std::vector<int>& prior_failed);

/// What one process has accumulated from reports and its own receptions.
struct CompactState {
  std::vector<int> known_value;          // -1 when unknown
  std::vector<int> min_crash_round;      // 0 when no failure is known
  std::vector<int> max_witnessed_level;  // -1 when no node of j is seen
  Mask heard = 0;                        // senders heard directly in the last round, self included

  // sender side: what this process has already reported
  std::vector<char> value_sent;
  std::vector<int> failed_reports;
  std::vector<int> failed_round_sent;
  std::vector<char> failed_flag_sent;

  // receiver side, indexed [sender * n + subject] or [sender]
  std::vector<Mask> sender_values;
  std::vector<int> sender_failed;
  std::vector<char> sender_flag;
};

/// Runs the compact exchange round by round over one adversary.
class CompactEngine {
 public:
  /// debug: compare every rebuilt Knowledge with the full-information one and
  /// throw Error{ReconstructionMismatch} on any difference.
  CompactEngine(const Adversary& adv, int horizon, int value_count, bool build_knowledge = true, bool debug = false);

  int round() const { return round_; }
  const CompactState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }

  /// Message of `sender` in the next round. Throws Error{BudgetViolation}
  /// when it would repeat a VALUE or exceed two FAILED_AT for a subject.
  Bits encode_round(int sender);

  /// Executes the next round: encode, deliver per the failure pattern, decode
  /// and update every state.
  void step();
  void run();

  /// Knowledge of <i,m>, null when the node does not exist or knowledge is off.
  const Knowledge* knowledge(int i, int m) const;
  std::uint64_t bits(int sender, int receiver) const {
    return bits_[static_cast<std::size_t>(sender * adv_.n + receiver)];
  }
  std::uint64_t max_pair_bits() const;
  int max_value_reports() const;
  int max_failed_reports() const;

  DecisionSchedule decide(const ProtocolSpec& spec) const;

 private:
  std::vector<Report> pending(int sender) const;
  /// prev_vals: the owner's known values one step earlier.
  void build(int i, int m, Mask prev_vals);

  Adversary adv_;
  int horizon_ = 0;
  WireFormat fmt_;
  bool build_knowledge_ = true;
  bool debug_ = false;
  int round_ = 0;
  std::vector<CompactState> states_;
  std::vector<Knowledge> knowledge_;  // [i * (horizon+1) + m]
  std::vector<std::uint64_t> bits_;
  CommunicationGraph graph_;
};

/// Schedule of `spec` when decisions use only reconstructed knowledge.
DecisionSchedule decode_and_decide(const ProtocolSpec& spec, const Adversary& adv, int horizon, bool debug = false);

struct CodecMismatch {
  std::uint64_t index = 0;
  ProtocolSpec protocol;
};

struct CodecSweep {
  EnumerationDomain domain;
  std::vector<ProtocolSpec> protocols;
  std::uint64_t adversaries = 0;
  std::uint64_t schedule_mismatches = 0;
  std::optional<CodecMismatch> first_mismatch;
  std::uint64_t max_pair_bits = 0;
  int max_value_reports = 0;
  int max_failed_reports = 0;

  bool pass() const { return schedule_mismatches == 0 && max_value_reports <= 1 && max_failed_reports <= 2; }
};

/// Every protocol applicable to the domain, k-protocols for every valid k.
std::vector<ProtocolSpec> codec_protocols(const EnumerationDomain& dom);

/// Exhaustive equivalence with debug reconstruction checks on every node.
CodecSweep codec_sweep(const EnumerationDomain& dom, const std::vector<ProtocolSpec>& protocols, int workers = 1);

Adversary random_adversary(int n, int t, int value_count, int horizon, std::mt19937_64& rng);

struct BitBudgetCheck {
  int n = 0;
  int samples = 0;
  std::uint64_t max_pair_bits = 0;
  double budget = 0;
  int max_value_reports = 0;
  int max_failed_reports = 0;

  bool pass() const {
    return static_cast<double>(max_pair_bits) <= budget && max_value_reports <= 1 && max_failed_reports <= 2;
  }
};

/// Random binary adversaries with t = n-1 and horizon t+1; sample s uses a
/// generator seeded with seed + s, so results do not depend on `workers`.
BitBudgetCheck bit_budget_check(int n, int samples, std::uint64_t seed, int workers = 1);

}  // namespace unbeat
