#pragma once

// JSON and CSV serialization. All ids in the external formats are 1-based.

#include <string>

#include "json.hpp"
#include "unbeat/codec.hpp"
#include "unbeat/domain.hpp"
#include "unbeat/model.hpp"
#include "unbeat/oracle.hpp"
#include "unbeat/protocols.hpp"
#include "unbeat/search.hpp"
#include "unbeat/sim.hpp"
#include "unbeat/sweep.hpp"

namespace unbeat {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Parses {"n","t","values","crashes":[{"process","round","delivers_to"}]}.
/// Throws Error{ParseError} naming the line or field, then validates with
/// validate_adversary(adv, value_count).
Adversary parse_adversary(const std::string& text, int value_count);
Adversary load_adversary(const std::string& path, int value_count);

Json to_json(const Adversary& adv);
Json to_json(const DecisionSchedule& sched);
Json to_json(const ProtocolSpec& spec);
Json to_json(const TaskSpec& task);
Json to_json(const EnumerationDomain& dom);
Json to_json(const PropertyFailure& failure);
Json to_json(const DominationReport& report);
Json to_json(const SearchStats& stats);
Json to_json(const SearchResult& result);
Json to_json(const OracleSweep& sweep);
Json to_json(const HiddenVariantSweep& sweep);
Json to_json(const CodecSweep& sweep);
Json to_json(const BitBudgetCheck& check);
Json to_json(const Knowledge& k);
Json to_json(const VerifySweep& sweep);
Json to_json(const ScheduleAgreement& agreement);

/// {adversary, protocol, task, pass, failures:[{property, detail}]}
Json verdict_json(const Adversary& adv, const ProtocolSpec& spec, const TaskSpec& task, const RunVerdict& verdict);

/// One row per process: process,decided,time,value,crash_round.
std::string schedule_csv(const DecisionSchedule& sched);

}  // namespace unbeat
