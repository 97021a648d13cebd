#include "unbeat/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "unbeat/errors.hpp"

namespace unbeat {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

void only_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad_field(where.empty() ? key : where + "." + key, "unknown key");
  }
}

int get_int(const Json& obj, const std::string& key, const std::string& field) {
  if (!obj.contains(key)) bad_field(field, "missing");
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(field, "expected an integer");
  return v.get<int>();
}

int get_process(const Json& v, const std::string& field, int n) {
  if (!v.is_number_integer()) bad_field(field, "expected a process id");
  const int p = v.get<int>();
  if (p < 1 || p > n) {
    bad_field(field, "process " + std::to_string(p) + " out of range 1.." + std::to_string(n) +
                         " (processes are 1-indexed)");
  }
  return p - 1;
}

Json ids(Mask m) {
  Json out = Json::array();
  for (; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
  return out;
}

Json optional_int(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

Json witness_json(const DominationWitness& w) {
  return Json{{"index", w.index},
              {"adversary", to_json(w.adversary)},
              {"process", w.process < 0 ? Json(nullptr) : Json(w.process + 1)},
              {"time_a", optional_int(w.time_a)},
              {"time_b", optional_int(w.time_b)}};
}

}  // namespace

Adversary parse_adversary(const std::string& text, int value_count) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "adversary must be a JSON object");
  only_keys(doc, "", {"n", "t", "values", "crashes"});
  Adversary adv;
  adv.n = get_int(doc, "n", "n");
  if (adv.n < 1 || adv.n > kMaxProcesses) bad_field("n", "must be in 1.." + std::to_string(kMaxProcesses));
  adv.pattern.t = get_int(doc, "t", "t");
  if (!doc.contains("values") || !doc["values"].is_array()) bad_field("values", "expected an array");
  for (std::size_t i = 0; i < doc["values"].size(); ++i) {
    const Json& v = doc["values"][i];
    if (!v.is_number_integer()) bad_field("values[" + std::to_string(i) + "]", "expected an integer");
    adv.values.push_back(v.get<int>());
  }
  if (static_cast<int>(adv.values.size()) != adv.n) bad_field("values", "expected " + std::to_string(adv.n) + " entries");
  if (doc.contains("crashes")) {
    const Json& crashes = doc["crashes"];
    if (!crashes.is_array()) bad_field("crashes", "expected an array");
    for (std::size_t c = 0; c < crashes.size(); ++c) {
      const std::string where = "crashes[" + std::to_string(c) + "]";
      const Json& obj = crashes[c];
      if (!obj.is_object()) bad_field(where, "expected an object");
      only_keys(obj, where, {"process", "round", "delivers_to"});
      Crash crash;
      if (!obj.contains("process")) bad_field(where + ".process", "missing");
      crash.process = get_process(obj["process"], where + ".process", adv.n);
      crash.round = get_int(obj, "round", where + ".round");
      if (obj.contains("delivers_to")) {
        const Json& to = obj["delivers_to"];
        if (!to.is_array()) bad_field(where + ".delivers_to", "expected an array");
        for (std::size_t k = 0; k < to.size(); ++k) {
          crash.delivers_to |= bit(get_process(to[k], where + ".delivers_to[" + std::to_string(k) + "]", adv.n));
        }
      }
      adv.pattern.crashes.push_back(crash);
    }
  }
  validate_adversary(adv, value_count);
  std::sort(adv.pattern.crashes.begin(), adv.pattern.crashes.end(),
            [](const Crash& a, const Crash& b) { return a.process < b.process; });
  return adv;
}

Adversary load_adversary(const std::string& path, int value_count) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_adversary(buf.str(), value_count);
}

Json to_json(const Adversary& adv) {
  Json crashes = Json::array();
  for (const auto& c : adv.pattern.crashes) {
    crashes.push_back(Json{{"process", c.process + 1}, {"round", c.round}, {"delivers_to", ids(c.delivers_to)}});
  }
  return Json{{"n", adv.n}, {"t", adv.pattern.t}, {"values", adv.values}, {"crashes", crashes}};
}

Json to_json(const DecisionSchedule& sched) {
  Json rows = Json::array();
  for (int i = 0; i < sched.n; ++i) {
    const auto& d = sched.decisions[static_cast<std::size_t>(i)];
    rows.push_back(Json{{"process", i + 1},
                        {"decided", d.has_value()},
                        {"time", d ? Json(d->time) : Json(nullptr)},
                        {"value", d ? Json(d->value) : Json(nullptr)},
                        {"crash_round", optional_int(sched.crash_round[static_cast<std::size_t>(i)])}});
  }
  return Json{{"n", sched.n}, {"horizon", sched.horizon}, {"decisions", rows}};
}

Json to_json(const ProtocolSpec& spec) {
  return Json{{"id", std::string(protocol_name(spec.id))},
              {"k", optional_int(spec.k)},
              {"values", spec.value_count},
              {"n", spec.n},
              {"t", spec.t}};
}

Json to_json(const TaskSpec& task) {
  return Json{{"task", std::string(task_name(task.kind))}, {"k", task.k}, {"values", task.value_count}};
}

Json to_json(const EnumerationDomain& dom) {
  return Json{{"n", dom.n}, {"t", dom.t}, {"values", dom.value_count}, {"horizon", dom.horizon}};
}

Json to_json(const PropertyFailure& failure) {
  Json processes = Json::array();
  for (int p : failure.processes) processes.push_back(p + 1);
  return Json{{"property", failure.property}, {"detail", failure.detail}, {"processes", processes}};
}

Json to_json(const DominationReport& report) {
  Json fwd = Json::array();
  for (const auto& w : report.witnesses) fwd.push_back(witness_json(w));
  Json rev = Json::array();
  for (const auto& w : report.reverse) rev.push_back(witness_json(w));
  return Json{{"relation", std::string(relation_name(report.relation))},
              {"adversaries", report.adversaries},
              {"a_earlier", report.earlier},
              {"b_earlier", report.later},
              {"witnesses", fwd},
              {"reverse_witnesses", rev}};
}

Json to_json(const SearchStats& stats) {
  return Json{{"adversaries", stats.adversaries},
              {"views", stats.views},
              {"target_decision_views", stats.target_decision_views},
              {"variables", stats.variables},
              {"clauses", stats.clauses},
              {"conflicts", stats.conflicts},
              {"decisions", stats.decisions}};
}

Json to_json(const SearchResult& result) {
  Json out{{"mode", std::string(mode_name(result.mode))},
           {"scope", std::string(scope_name(result.scope))},
           {"beatable", result.beatable()},
           {"target_solves", result.target_solves},
           {"target_decides_by_horizon", result.target_decides_by_horizon},
           {"space", to_json(result.stats)}};
  if (result.witness) {
    Json table = Json::array();
    for (const auto& [view, value] : result.witness->decision) table.push_back(Json{{"view", view}, {"value", value}});
    out["witness"] = Json{{"decision_views", result.witness->decision.size()},
                          {"domination", to_json(*result.witness_report)},
                          {"table", table}};
  } else {
    Json audit = Json::array();
    for (const auto& a : result.audit) {
      audit.push_back(Json{{"protocol", a.protocol.label()},
                           {"solves", a.solves},
                           {"relation_to_target", std::string(relation_name(a.relation))}});
    }
    out["certificate"] = Json{{"claim", "no decision table on this domain solves the task and strictly dominates "
                                        "the target"},
                              {"solver", "unsatisfiable"},
                              {"audit", audit}};
  }
  return out;
}

Json to_json(const OracleSweep& sweep) {
  Json rows = Json::array();
  for (const auto& r : sweep.rows) {
    Json row{{"predicate", r.predicate},
             {"fact", r.fact},
             {"views", r.views},
             {"disagreements", r.disagreements},
             {"diagnostic", r.diagnostic},
             {"pass", r.disagreements == 0}};
    if (r.disagreements != 0) {
      row["example"] = Json{{"index", r.example_index},
                            {"process", r.example_owner + 1},
                            {"time", r.example_time},
                            {"combinatorial_value", r.combinatorial_value}};
    }
    rows.push_back(row);
  }
  return Json{{"domain", to_json(sweep.domain)},
              {"adversaries", sweep.adversaries},
              {"distinct_views", sweep.distinct_views},
              {"pass", sweep.pass()},
              {"rows", rows}};
}

Json to_json(const HiddenVariantSweep& sweep) {
  Json out{{"domain", to_json(sweep.domain)},
           {"adversaries", sweep.adversaries},
           {"cases", sweep.cases},
           {"failures", sweep.failures},
           {"pass", sweep.pass()}};
  if (sweep.failures != 0) {
    out["example"] = Json{{"index", sweep.example_index},
                          {"process", sweep.example_owner + 1},
                          {"time", sweep.example_time}};
  }
  return out;
}

Json to_json(const CodecSweep& sweep) {
  Json protocols = Json::array();
  for (const auto& p : sweep.protocols) protocols.push_back(p.label());
  Json first = nullptr;
  if (sweep.first_mismatch) {
    first = Json{{"index", sweep.first_mismatch->index}, {"protocol", sweep.first_mismatch->protocol.label()}};
  }
  return Json{{"domain", to_json(sweep.domain)},
              {"protocols", protocols},
              {"adversaries", sweep.adversaries},
              {"schedule_mismatches", sweep.schedule_mismatches},
              {"first_mismatch", first},
              {"max_bits_per_pair", sweep.max_pair_bits},
              {"max_value_reports", sweep.max_value_reports},
              {"max_failed_reports", sweep.max_failed_reports},
              {"pass", sweep.pass()}};
}

Json to_json(const BitBudgetCheck& check) {
  return Json{{"n", check.n},
              {"samples", check.samples},
              {"max_bits_per_pair", check.max_pair_bits},
              {"constant", kCodecConstant},
              {"budget", check.budget},
              {"max_value_reports", check.max_value_reports},
              {"max_failed_reports", check.max_failed_reports},
              {"pass", check.pass()}};
}

Json to_json(const Knowledge& k) {
  Json initial = Json::array();
  for (int v : k.initial) initial.push_back(v < 0 ? Json(nullptr) : Json(v));
  Json crashed_by = Json::array();
  for (int c : k.crashed_by) crashed_by.push_back(c == 0 ? Json(nullptr) : Json(c));
  Json hidden = Json::array();
  for (Mask h : k.hidden_by_level) hidden.push_back(ids(h));
  Json vals = Json::array();
  for (int v = 0; v < 64; ++v) {
    if (has(k.vals, v)) vals.push_back(v);
  }
  return Json{{"process", k.owner.process + 1},
              {"time", k.owner.time},
              {"known_values", vals},
              {"initial", initial},
              {"crashed_by", crashed_by},
              {"hidden_by_level", hidden},
              {"capacity", k.capacity},
              {"hidden_path", k.hidden_path()},
              {"knownf", k.knownf},
              {"round_witnesses", ids(k.witnesses)}};
}

Json to_json(const VerifySweep& sweep) {
  return Json{{"protocol", to_json(sweep.protocol)},
              {"task", to_json(sweep.task)},
              {"domain", to_json(sweep.domain)},
              {"runs", sweep.adversaries},
              {"failures", sweep.failures},
              {"bound_violations", sweep.bound_violations},
              {"max_decision_time", sweep.max_decision_time},
              {"pass", sweep.pass()}};
}

Json to_json(const ScheduleAgreement& agreement) {
  return Json{{"a", to_json(agreement.a)},
              {"b", to_json(agreement.b)},
              {"domain", to_json(agreement.domain)},
              {"adversaries", agreement.adversaries},
              {"mismatches", agreement.mismatches},
              {"first_mismatch", agreement.first_mismatch ? Json(*agreement.first_mismatch) : Json(nullptr)},
              {"pass", agreement.pass()}};
}

Json verdict_json(const Adversary& adv, const ProtocolSpec& spec, const TaskSpec& task, const RunVerdict& verdict) {
  Json failures = Json::array();
  for (const auto& f : verdict.failures) failures.push_back(to_json(f));
  return Json{{"adversary", to_json(adv)},
              {"protocol", to_json(spec)},
              {"task", to_json(task)},
              {"pass", verdict.pass()},
              {"failures", failures}};
}

std::string schedule_csv(const DecisionSchedule& sched) {
  std::string out = "process,decided,time,value,crash_round\n";
  for (int i = 0; i < sched.n; ++i) {
    const auto& d = sched.decisions[static_cast<std::size_t>(i)];
    const auto& c = sched.crash_round[static_cast<std::size_t>(i)];
    out += std::to_string(i + 1) + "," + (d ? "true" : "false") + "," + (d ? std::to_string(d->time) : "") + "," +
           (d ? std::to_string(d->value) : "") + "," + (c ? std::to_string(*c) : "") + "\n";
  }
  return out;
}

}  // namespace unbeat
