#include "unbeat/protocols.hpp"

#include <array>
#include <utility>

#include "unbeat/errors.hpp"

namespace unbeat {

namespace {

constexpr std::array<std::pair<ProtocolId, std::string_view>, 10> kNames{{
    {ProtocolId::P0, "p0"},
    {ProtocolId::Opt0, "opt0"},
    {ProtocolId::Opt1, "opt1"},
    {ProtocolId::OptMin, "opt-min"},
    {ProtocolId::OptMaj, "opt-maj"},
    {ProtocolId::OptMinK, "opt-min-k"},
    {ProtocolId::UP0, "u-p0"},
    {ProtocolId::UOpt0, "u-opt0"},
    {ProtocolId::UProtMinK, "u-prot-min-k"},
    {ProtocolId::P0OptHmw, "p0opt-hmw"},
}};

bool needs_binary(ProtocolId id) {
  return id != ProtocolId::OptMin && id != ProtocolId::OptMinK && id != ProtocolId::UProtMinK;
}

bool needs_k(ProtocolId id) { return id == ProtocolId::OptMinK || id == ProtocolId::UProtMinK; }

bool k_ready(const Knowledge& kn, int k) { return kn.low(k) || kn.capacity < k; }

std::optional<Value> from_views(const DecisionRuleInput& in, ProtocolId id) {
  ProtocolSpec spec = in.spec;
  spec.id = id;
  const bool has_prev = in.view_now.time() > 0;
  if (has_prev != (in.view_prev != nullptr)) {
    throw Error(ErrorCode::MismatchedViews, "predecessor view must be given iff time > 0");
  }
  Knowledge now = summarize(in.view_now);
  if (!has_prev) return decide(spec, now, nullptr);
  if (in.view_prev->owner() != Node{now.owner.process, now.time() - 1}) {
    throw Error(ErrorCode::MismatchedViews, "predecessor view of another node");
  }
  Knowledge prev = summarize(*in.view_prev);
  return decide(spec, now, &prev);
}

}  // namespace

std::string_view protocol_name(ProtocolId id) {
  for (const auto& [pid, name] : kNames) {
    if (pid == id) return name;
  }
  return "unknown";
}

std::optional<ProtocolId> parse_protocol(std::string_view name) {
  for (const auto& [pid, n] : kNames) {
    if (n == name) return pid;
  }
  return std::nullopt;
}

const std::vector<ProtocolId>& all_protocols() {
  static const std::vector<ProtocolId> ids = [] {
    std::vector<ProtocolId> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return ids;
}

void ProtocolSpec::validate() const {
  if (n < 2 || n > kMaxProcesses) throw Error(ErrorCode::InvalidProtocol, "n out of range");
  if (t < 0 || t > n - 1) throw Error(ErrorCode::InvalidProtocol, "t must lie in 0..n-1");
  if (value_count < 2) throw Error(ErrorCode::InvalidProtocol, "at least two values required");
  if (needs_binary(id) && value_count != 2) {
    throw Error(ErrorCode::NonBinaryTask, std::string(protocol_name(id)) + " requires binary values");
  }
  if (needs_k(id)) {
    if (!k || *k < 1) throw Error(ErrorCode::InvalidProtocol, "k >= 1 required");
    if (*k > value_count - 1) throw Error(ErrorCode::InvalidProtocol, "k must not exceed the largest value");
  }
}

std::string ProtocolSpec::label() const {
  std::string out(protocol_name(id));
  if (needs_k(id) && k) out += "(k=" + std::to_string(*k) + ")";
  return out;
}

std::optional<Value> decide(const ProtocolSpec& spec, const Knowledge& now, const Knowledge* prev) {
  const int m = now.time();
  const int k = spec.k_or_1();
  switch (spec.id) {
    case ProtocolId::P0:
      if (has(now.vals, 0)) return 0;
      if (m == spec.t + 1) return 1;
      return std::nullopt;
    case ProtocolId::Opt0:
      if (has(now.vals, 0)) return 0;
      if (!now.hidden_path()) return 1;
      return std::nullopt;
    case ProtocolId::Opt1:
      if (has(now.vals, 1)) return 1;
      if (!now.hidden_path()) return 0;
      return std::nullopt;
    case ProtocolId::OptMin:
      if (has(now.vals, 0)) return 0;
      if (!now.hidden_path()) return now.min_value();
      return std::nullopt;
    case ProtocolId::OptMaj:
      if (knows_majority(now, 0)) return 0;
      if (knows_majority(now, 1)) return 1;
      if (!now.hidden_path()) return maj_vals(now);
      return std::nullopt;
    case ProtocolId::OptMinK:
      if (k_ready(now, k)) return now.min_value();
      return std::nullopt;
    case ProtocolId::UP0:
      if (knows_exists_correct(now, 0, spec.t)) return 0;
      if (m == spec.t + 1) return 1;
      return std::nullopt;
    case ProtocolId::UOpt0:
      if (knows_exists_correct(now, 0, spec.t)) return 0;
      if (!now.hidden_path() && !has(now.vals, 0)) return 1;
      return std::nullopt;
    case ProtocolId::UProtMinK:
      if (k_ready(now, k) && knows_exists_correct(now, now.min_value(), spec.t)) return now.min_value();
      if (prev != nullptr && k_ready(*prev, k)) return prev->min_value();
      if (m == spec.t / k + 1) return now.min_value();
      return std::nullopt;
    case ProtocolId::P0OptHmw:
      if (has(now.vals, 0)) return 0;
      if (prev != nullptr && now.crashed == prev->crashed) return 1;
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Value> decide_P0(const DecisionRuleInput& in) { return from_views(in, ProtocolId::P0); }
std::optional<Value> decide_OPT0(const DecisionRuleInput& in) { return from_views(in, ProtocolId::Opt0); }
std::optional<Value> decide_OPT1(const DecisionRuleInput& in) { return from_views(in, ProtocolId::Opt1); }
std::optional<Value> decide_OPT_MIN(const DecisionRuleInput& in) { return from_views(in, ProtocolId::OptMin); }
std::optional<Value> decide_OPT_MAJ(const DecisionRuleInput& in) { return from_views(in, ProtocolId::OptMaj); }
std::optional<Value> decide_OPT_MIN_K(const DecisionRuleInput& in) { return from_views(in, ProtocolId::OptMinK); }
std::optional<Value> decide_U_P0(const DecisionRuleInput& in) { return from_views(in, ProtocolId::UP0); }
std::optional<Value> decide_U_OPT0(const DecisionRuleInput& in) { return from_views(in, ProtocolId::UOpt0); }
std::optional<Value> decide_U_PROT_MIN_K(const DecisionRuleInput& in) {
  return from_views(in, ProtocolId::UProtMinK);
}
std::optional<Value> decide_P0OPT_HMW(const DecisionRuleInput& in) { return from_views(in, ProtocolId::P0OptHmw); }

std::optional<Value> decide(const DecisionRuleInput& in) { return from_views(in, in.spec.id); }

void Simulator::run(const ProtocolSpec& spec, const Adversary& adv, int horizon, DecisionSchedule& out) {
  out.n = adv.n;
  out.horizon = horizon;
  out.decisions.assign(static_cast<std::size_t>(adv.n), std::nullopt);
  out.crash_round.assign(static_cast<std::size_t>(adv.n), std::nullopt);
  for (const auto& c : adv.pattern.crashes) out.crash_round[static_cast<std::size_t>(c.process)] = c.round;
  graph_.assign(adv, horizon);
  for (int i = 0; i < adv.n; ++i) {
    for (int m = 0; m <= horizon && has(graph_.active(m), i); ++m) {
      graph_.view_into(i, m, view_);
      summarize_into(view_, now_);
      auto d = decide(spec, now_, m == 0 ? nullptr : &prev_);
      if (d) {
        out.decisions[static_cast<std::size_t>(i)] = Decision{m, *d};
        break;
      }
      std::swap(now_, prev_);
    }
  }
}

DecisionSchedule simulate(const ProtocolSpec& spec, const Adversary& adv, int horizon) {
  DecisionSchedule out;
  Simulator().run(spec, adv, horizon, out);
  return out;
}

}  // namespace unbeat
