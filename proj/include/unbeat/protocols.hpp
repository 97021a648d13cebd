#pragma once

// Decision rules of the implemented full-information protocols.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unbeat/knowledge.hpp"
#include "unbeat/model.hpp"

namespace unbeat {

enum class ProtocolId { P0, Opt0, Opt1, OptMin, OptMaj, OptMinK, UP0, UOpt0, UProtMinK, P0OptHmw };

/// Lowercase CLI id, e.g. "opt0", "u-prot-min-k".
std::string_view protocol_name(ProtocolId id);
std::optional<ProtocolId> parse_protocol(std::string_view name);
const std::vector<ProtocolId>& all_protocols();

struct ProtocolSpec {
  ProtocolId id = ProtocolId::Opt0;
  std::optional<int> k;
  int value_count = 2;  // V = {0..value_count-1}
  int t = 0;
  int n = 2;

  /// Throws Error{InvalidProtocol} or Error{NonBinaryTask}.
  void validate() const;
  int k_or_1() const { return k.value_or(1); }
  std::string label() const;
  bool operator==(const ProtocolSpec&) const = default;
};

struct DecisionRuleInput {
  const View& view_now;
  const View* view_prev = nullptr;
  const ProtocolSpec& spec;
};

std::optional<Value> decide_P0(const DecisionRuleInput& in);
std::optional<Value> decide_OPT0(const DecisionRuleInput& in);
std::optional<Value> decide_OPT1(const DecisionRuleInput& in);
std::optional<Value> decide_OPT_MIN(const DecisionRuleInput& in);
std::optional<Value> decide_OPT_MAJ(const DecisionRuleInput& in);
std::optional<Value> decide_OPT_MIN_K(const DecisionRuleInput& in);
std::optional<Value> decide_U_P0(const DecisionRuleInput& in);
std::optional<Value> decide_U_OPT0(const DecisionRuleInput& in);
std::optional<Value> decide_U_PROT_MIN_K(const DecisionRuleInput& in);
std::optional<Value> decide_P0OPT_HMW(const DecisionRuleInput& in);

/// Dispatches on in.spec.id.
std::optional<Value> decide(const DecisionRuleInput& in);

/// The same rules over pre-extracted knowledge; `prev` is null at time 0.
std::optional<Value> decide(const ProtocolSpec& spec, const Knowledge& now, const Knowledge* prev);

/// Runs the protocol on one adversary with reusable buffers.
class Simulator {
 public:
  void run(const ProtocolSpec& spec, const Adversary& adv, int horizon, DecisionSchedule& out);

 private:
  CommunicationGraph graph_;
  View view_;
  Knowledge now_;
  Knowledge prev_;
};

DecisionSchedule simulate(const ProtocolSpec& spec, const Adversary& adv, int horizon);

}  // namespace unbeat
