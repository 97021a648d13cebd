#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "unbeat/errors.hpp"
#include "unbeat/io.hpp"
#include "unbeat/knowledge.hpp"
#include "unbeat/sweep.hpp"

namespace unbeat::cli {

namespace {

/// Bad flag value detected after parsing; the message names the flag.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  int n = 0;
  int t = 0;
  int k = 1;
  int values = 2;
  std::optional<int> horizon;
  std::string protocol;
  std::string a;
  std::string b;
  std::string target;
  std::string task;
  std::string adversary;
  std::string mode = "per-process";
  std::string scope = "correct";
  double budget = 1e8;
  bool unguarded = false;
  int workers = default_workers();
  std::string output = "json";
  int process = 1;
  int time = 0;
  bool semantic = false;
  int samples = 0;
  std::vector<int> sizes{8, 16, 32};
  std::uint64_t seed = 12345;
};

struct Outcome {
  Json results;
  int code = kExitPass;
  std::string csv;  // replaces the generic CSV summary when set
};

bool needs_k(ProtocolId id) { return id == ProtocolId::OptMinK || id == ProtocolId::UProtMinK; }

ProtocolId protocol_id(const std::string& flag, const std::string& name) {
  if (auto id = parse_protocol(name)) return *id;
  std::string known;
  for (ProtocolId id : all_protocols()) known += (known.empty() ? "" : ", ") + std::string(protocol_name(id));
  throw UsageError(flag + ": unknown protocol '" + name + "' (one of " + known + ")");
}

ProtocolSpec protocol_spec(const std::string& flag, const std::string& name, const Options& o, int n, int t) {
  ProtocolSpec spec;
  spec.id = protocol_id(flag, name);
  if (needs_k(spec.id)) spec.k = o.k;
  spec.value_count = o.values;
  spec.n = n;
  spec.t = t;
  spec.validate();
  return spec;
}

TaskSpec task_spec(const Options& o) {
  auto kind = parse_task(o.task);
  if (!kind) throw UsageError("--task: unknown task '" + o.task + "'");
  TaskSpec task;
  task.kind = *kind;
  task.k = *kind == TaskKind::KSet || *kind == TaskKind::UniformKSet ? o.k : 1;
  task.value_count = o.values;
  task.validate();
  return task;
}

EnumerationDomain domain(const Options& o) {
  EnumerationDomain dom = EnumerationDomain::standard(o.n, o.t, o.values);
  if (o.horizon) dom.horizon = *o.horizon;
  return dom;
}

Json verdict_only(const RunVerdict& verdict) {
  Json failures = Json::array();
  for (const auto& f : verdict.failures) failures.push_back(to_json(f));
  return Json{{"pass", verdict.pass()}, {"failures", failures}};
}

Outcome simulate_verb(const Options& o) {
  const Adversary adv = load_adversary(o.adversary, o.values);
  const ProtocolSpec spec = protocol_spec("--protocol", o.protocol, o, adv.n, adv.pattern.t);
  const int horizon = o.horizon.value_or(adv.pattern.t + 1);
  const DecisionSchedule sched = simulate(spec, adv, horizon);
  Outcome out;
  out.results = Json{{"protocol", to_json(spec)}, {"adversary", to_json(adv)}, {"schedule", to_json(sched)}};
  out.csv = schedule_csv(sched);
  if (!o.task.empty()) {
    const TaskSpec task = task_spec(o);
    const RunVerdict verdict = check_run(task, adv, sched);
    const bool within = check_bounds(task, spec, adv, sched);
    out.results["task"] = to_json(task);
    out.results["verdict"] = verdict_only(verdict);
    out.results["bound"] = Json{{"decision_bound", decision_bound(spec, adv.failures())}, {"within", within}};
    if (!verdict.pass() || !within) out.code = kExitFinding;
  }
  return out;
}

Outcome verify_verb(const Options& o) {
  const ProtocolSpec spec = protocol_spec("--protocol", o.protocol, o, o.n, o.t);
  const TaskSpec task = task_spec(o);
  const EnumerationDomain dom = domain(o);
  const VerifySweep sweep = verify_sweep(spec, task, dom, o.workers);
  Outcome out;
  out.results = to_json(sweep);
  AdversarySpace space(dom);
  if (sweep.first_failure) {
    const Adversary adv = space.at(*sweep.first_failure);
    const DecisionSchedule sched = simulate(spec, adv, dom.horizon);
    Json example = verdict_json(adv, spec, task, check_run(task, adv, sched));
    example["schedule"] = to_json(sched);
    out.results["counterexample"] = example;
  }
  if (sweep.first_bound_violation) {
    const Adversary adv = space.at(*sweep.first_bound_violation);
    out.results["bound_counterexample"] =
        Json{{"adversary", to_json(adv)},
             {"decision_bound", decision_bound(spec, adv.failures())},
             {"schedule", to_json(simulate(spec, adv, dom.horizon))}};
  }
  out.code = sweep.pass() ? kExitPass : kExitFinding;
  return out;
}

Outcome compare_verb(const Options& o) {
  const ProtocolSpec a = protocol_spec("--a", o.a, o, o.n, o.t);
  const ProtocolSpec b = protocol_spec("--b", o.b, o, o.n, o.t);
  const EnumerationDomain dom = domain(o);
  const SearchMode mode = *parse_mode(o.mode);
  const DominationReport report = mode == SearchMode::PerProcess
                                      ? compare(a, b, dom, o.workers)
                                      : compare_last_decider(a, b, dom, *parse_scope(o.scope), o.workers);
  Outcome out;
  out.results = Json{{"a", to_json(a)}, {"b", to_json(b)}, {"domain", to_json(dom)}, {"mode", o.mode}};
  if (mode == SearchMode::LastDecider) out.results["scope"] = o.scope;
  out.results["report"] = to_json(report);
  return out;
}

Outcome beat_search_verb(const Options& o) {
  if (!(o.budget >= 0) || o.budget > 1e18) throw UsageError("--budget: must be a non-negative number of conflicts");
  const ProtocolSpec target = protocol_spec("--target", o.target, o, o.n, o.t);
  const TaskSpec task = task_spec(o);
  const EnumerationDomain dom = domain(o);
  SearchOptions options;
  options.mode = *parse_mode(o.mode);
  options.scope = *parse_scope(o.scope);
  options.budget = static_cast<std::uint64_t>(std::llround(o.budget));
  options.guard = !o.unguarded;
  options.workers = o.workers;
  Outcome out;
  out.results = Json{{"target", to_json(target)}, {"task", to_json(task)}, {"domain", to_json(dom)}};
  try {
    const SearchResult result = beat_search(target, task, dom, options);
    out.results["search"] = to_json(result);
    out.code = result.beatable() ? kExitFinding : kExitPass;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SearchBudgetExceeded) throw;
    out.results["search"] = Json{{"error", std::string(to_string(e.code()))}, {"detail", e.what()}};
    out.code = kExitFinding;
  }
  return out;
}

Outcome oracle_verb(const Options& o) {
  const EnumerationDomain dom = domain(o);
  const OracleSweep sweep = oracle_sweep(dom, o.workers);
  const HiddenVariantSweep variants = hidden_variant_sweep(dom, o.workers);
  Outcome out;
  out.results = Json{{"oracle", to_json(sweep)}, {"hidden_variant", to_json(variants)}};
  out.code = sweep.pass() && variants.pass() ? kExitPass : kExitFinding;
  return out;
}

Outcome codec_verb(const Options& o) {
  const EnumerationDomain dom = domain(o);
  std::vector<ProtocolSpec> protocols;
  if (o.protocol.empty()) {
    protocols = codec_protocols(dom);
  } else {
    protocols.push_back(protocol_spec("--protocol", o.protocol, o, o.n, o.t));
  }
  const CodecSweep sweep = codec_sweep(dom, protocols, o.workers);
  Outcome out;
  out.results = Json{{"equivalence", to_json(sweep)}};
  bool pass = sweep.pass();
  if (o.samples > 0) {
    Json budgets = Json::array();
    for (int n : o.sizes) {
      if (n < 2 || n > kMaxProcesses) throw UsageError("--sizes: process counts must lie in 2.." + std::to_string(kMaxProcesses));
      const BitBudgetCheck check = bit_budget_check(n, o.samples, o.seed, o.workers);
      budgets.push_back(to_json(check));
      pass = pass && check.pass();
    }
    out.results["bit_budget"] = budgets;
  }
  out.code = pass ? kExitPass : kExitFinding;
  return out;
}

Outcome predicates_verb(const Options& o) {
  const Adversary adv = load_adversary(o.adversary, o.values);
  const int i = o.process - 1;
  const int m = o.time;
  if (i < 0 || i >= adv.n) throw UsageError("--process: must lie in 1.." + std::to_string(adv.n));
  const int horizon = o.horizon.value_or(adv.pattern.t + 1);
  if (m < 0 || m > horizon) throw UsageError("--time: must lie in 0.." + std::to_string(horizon));
  const View v = view(adv, i, m);
  const Knowledge k = summarize(v);
  Json per_value = Json::array();
  const bool binary = o.values == 2;
  for (Value x = 0; x < o.values; ++x) {
    Json row{{"value", x},
             {"knows_exists", has(k.vals, x)},
             {"knows_exists_correct", knows_exists_correct(k, x, adv.pattern.t)}};
    if (binary) row["knows_majority"] = knows_majority(k, x);
    per_value.push_back(row);
  }
  Outcome out;
  out.results = Json{{"adversary", to_json(adv)},
                     {"knowledge", to_json(k)},
                     {"values", per_value},
                     {"never_known_0", !has(k.vals, 0) && !k.hidden_path()}};
  if (o.semantic) {
    const EnumerationDomain dom{adv.n, adv.pattern.t, o.values, horizon};
    Json facts = Json::array();
    for (Value x = 0; x < o.values; ++x) {
      for (FactKind kind : {FactKind::Exists, FactKind::ExistsCorrect, FactKind::NeverKnown}) {
        const FactId fact{kind, x};
        facts.push_back(Json{{"fact", fact.label()}, {"known", knows(dom, v, fact)}});
      }
      if (binary) {
        const FactId fact{FactKind::Maj, x};
        facts.push_back(Json{{"fact", fact.label()}, {"known", knows(dom, v, fact)}});
      }
    }
    out.results["semantic"] = Json{{"domain", to_json(dom)}, {"facts", facts}};
  }
  return out;
}

std::string summary_csv(const Json& results, double seconds) {
  std::string out = "key,value\n";
  for (const auto& [key, value] : results.items()) {
    if (value.is_primitive()) out += key + "," + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  }
  std::ostringstream s;
  s << seconds;
  return out + "wall_seconds," + s.str() + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Synchronous crash-failure consensus: simulation, certification and codec checks", "unbeat"};
  app.require_subcommand(1);

  auto add_domain = [&](CLI::App* sub, bool required) {
    auto* n = sub->add_option("--n", o.n, "number of processes")->check(CLI::Range(2, kMaxProcesses));
    auto* t = sub->add_option("--t", o.t, "crash bound")->check(CLI::NonNegativeNumber);
    if (required) {
      n->required();
      t->required();
    }
    sub->add_option("--values", o.values, "number of input values d, V = {0..d-1}")->check(CLI::Range(2, 8));
    sub->add_option("--horizon", o.horizon, "last time step (default t+1)")->check(CLI::NonNegativeNumber);
    sub->add_option("--k", o.k, "k for k-set tasks and k-protocols")->check(CLI::PositiveNumber);
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output", o.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "per-process or last-decider")->check(CLI::IsMember({"per-process", "last-decider"}));
    sub->add_option("--scope", o.scope, "last-decider scope: correct or all")->check(CLI::IsMember({"correct", "all"}));
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "run one protocol on one adversary file");
  add_domain(simulate_cmd, false);
  simulate_cmd->add_option("--protocol", o.protocol, "protocol id")->required();
  simulate_cmd->add_option("--adversary", o.adversary, "adversary JSON file")->required();
  simulate_cmd->add_option("--task", o.task, "also check this task");

  auto* verify_cmd = app.add_subcommand("verify", "check a task and its stopping bound on every adversary");
  add_domain(verify_cmd, true);
  verify_cmd->add_option("--protocol", o.protocol, "protocol id")->required();
  verify_cmd->add_option("--task", o.task, "task id")->required();

  auto* compare_cmd = app.add_subcommand("compare", "domination report of --a against --b");
  add_domain(compare_cmd, true);
  add_mode(compare_cmd);
  compare_cmd->add_option("--a", o.a, "first protocol")->required();
  compare_cmd->add_option("--b", o.b, "second protocol")->required();

  auto* beat_cmd = app.add_subcommand("beat-search", "search for a protocol that strictly dominates --target");
  add_domain(beat_cmd, true);
  add_mode(beat_cmd);
  beat_cmd->add_option("--target", o.target, "protocol to beat")->required();
  beat_cmd->add_option("--task", o.task, "task the dominating protocol must solve")->required();
  beat_cmd->add_option("--budget", o.budget, "solver conflict budget");
  beat_cmd->add_flag("--unguarded", o.unguarded, "lift the default domain size guard");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "combinatorial predicates against brute-force knowledge");
  add_domain(oracle_cmd, true);

  auto* codec_cmd = app.add_subcommand("codec-check", "compact messaging equivalence and bit budget");
  add_domain(codec_cmd, true);
  codec_cmd->add_option("--protocol", o.protocol, "single protocol (default: all applicable)");
  codec_cmd->add_option("--samples", o.samples, "random adversaries per size for the bit budget")
      ->check(CLI::NonNegativeNumber);
  codec_cmd->add_option("--sizes", o.sizes, "process counts for the bit budget")->delimiter(',');
  codec_cmd->add_option("--seed", o.seed, "base seed for the bit budget");

  auto* predicates_cmd = app.add_subcommand("predicates", "dump knowledge predicates of one node");
  add_domain(predicates_cmd, false);
  predicates_cmd->add_option("--adversary", o.adversary, "adversary JSON file")->required();
  predicates_cmd->add_option("--process", o.process, "process id, 1-based")->required();
  predicates_cmd->add_option("--time", o.time, "time step")->required();
  predicates_cmd->add_flag("--semantic", o.semantic, "also evaluate brute-force knowledge on the domain");

  std::vector<const char*> argv{"unbeat"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string verb = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  Outcome result;
  try {
    if (verb == "simulate") result = simulate_verb(o);
    else if (verb == "verify") result = verify_verb(o);
    else if (verb == "compare") result = compare_verb(o);
    else if (verb == "beat-search") result = beat_search_verb(o);
    else if (verb == "oracle-check") result = oracle_verb(o);
    else if (verb == "codec-check") result = codec_verb(o);
    else result = predicates_verb(o);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitUsage;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (o.output == "csv") {
    out << (verb == "simulate" ? result.csv : summary_csv(result.results, seconds));
  } else {
    Json envelope{{"schema_version", kSchemaVersion},
                  {"command", Json{{"verb", verb}, {"args", args}}},
                  {"results", result.results},
                  {"timing", Json{{"wall_seconds", seconds}}}};
    out << envelope.dump(2) << "\n";
  }
  return result.code;
}

}  // namespace unbeat::cli
