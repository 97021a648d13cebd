#include "unbeat/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "unbeat/errors.hpp"

namespace unbeat {

namespace {

enum Code : unsigned { kValue = 0, kFailedAt = 1, kAlive = 2, kEnd = 3 };

int width(int count) { return std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(count - 1)))); }

void put(Bits& out, unsigned v, int w) {
  for (int k = w - 1; k >= 0; --k) out.push_back(((v >> k) & 1U) != 0);
}

class Reader {
 public:
  explicit Reader(const Bits& bits) : bits_(bits) {}
  unsigned get(int w) {
    if (pos_ + static_cast<std::size_t>(w) > bits_.size()) throw Error(ErrorCode::ParseError, "truncated message");
    unsigned v = 0;
    for (int k = 0; k < w; ++k) v = (v << 1) | (bits_[pos_++] ? 1U : 0U);
    return v;
  }
  bool done() const { return pos_ == bits_.size(); }

 private:
  const Bits& bits_;
  std::size_t pos_ = 0;
};

Mask proven(const std::vector<int>& crashed_by, int level) {
  Mask m = 0;
  for (std::size_t j = 0; j < crashed_by.size(); ++j) {
    if (crashed_by[j] != 0 && crashed_by[j] <= level) m |= bit(static_cast<int>(j));
  }
  return m;
}

std::string mismatch_field(const Knowledge& a, const Knowledge& b) {
  if (a.initial != b.initial || a.vals != b.vals) return "initial values";
  if (a.crashed_by != b.crashed_by || a.crashed != b.crashed) return "crash evidence";
  if (a.hidden_by_level != b.hidden_by_level || a.capacity != b.capacity) return "hidden nodes";
  if (a.witnesses != b.witnesses || a.knownf != b.knownf) return "round witnesses";
  if (a.witness_vals != b.witness_vals) return "witness values";
  return "owner";
}

}  // namespace

double codec_bit_budget(int n) { return kCodecConstant * n * std::log2(static_cast<double>(n)); }

WireFormat WireFormat::make(int n, int value_count, int horizon) {
  return {n, value_count, horizon, width(n), width(value_count), width(horizon + 1)};
}

Bits encode_reports(const WireFormat& fmt, const std::vector<Report>& reports, const std::vector<int>& prior_failed) {
  Bits out;
  if (reports.empty() || (reports.size() == 1 && reports[0].kind == ReportKind::Alive)) {
    put(out, kAlive, 2);
    return out;
  }
  for (const auto& r : reports) {
    const auto subject = static_cast<unsigned>(r.subject.value_or(0));
    const int payload = r.payload.value_or(0);
    switch (r.kind) {
      case ReportKind::Value:
        put(out, kValue, 2);
        put(out, subject, fmt.id_bits);
        put(out, static_cast<unsigned>(payload), fmt.value_bits);
        break;
      case ReportKind::FailedAt: {
        put(out, kFailedAt, 2);
        put(out, subject, fmt.id_bits);
        const int prior = prior_failed[subject];
        if (prior == 0) {
          put(out, static_cast<unsigned>(payload), fmt.round_bits);
          put(out, r.witnessed ? 1U : 0U, 1);
        } else {
          if (!r.witnessed || (payload != prior && payload != prior - 1)) {
            throw Error(ErrorCode::BudgetViolation, "second failure report must set the witnessed flag");
          }
          put(out, payload == prior - 1 ? 1U : 0U, 1);
        }
        break;
      }
      case ReportKind::Alive:
        throw Error(ErrorCode::InvalidAdversary, "ALIVE cannot be combined with other reports");
    }
  }
  put(out, kEnd, 2);
  return out;
}

std::vector<Report> decode_reports(const WireFormat& fmt, const Bits& bits, const std::vector<int>& prior_failed) {
  Reader in(bits);
  std::vector<Report> out;
  unsigned code = in.get(2);
  if (code == kAlive) {
    if (!in.done()) throw Error(ErrorCode::ParseError, "trailing bits after ALIVE");
    return {Report{}};
  }
  for (; code != kEnd; code = in.get(2)) {
    Report r;
    const int subject = static_cast<int>(in.get(fmt.id_bits));
    if (subject >= fmt.n) throw Error(ErrorCode::ParseError, "subject out of range");
    r.subject = subject;
    if (code == kValue) {
      r.kind = ReportKind::Value;
      r.payload = static_cast<int>(in.get(fmt.value_bits));
    } else if (code == kFailedAt) {
      r.kind = ReportKind::FailedAt;
      const int prior = prior_failed[static_cast<std::size_t>(subject)];
      if (prior == 0) {
        r.payload = static_cast<int>(in.get(fmt.round_bits));
        r.witnessed = in.get(1) != 0;
      } else {
        r.payload = prior - static_cast<int>(in.get(1));
        r.witnessed = true;
      }
    } else {
      throw Error(ErrorCode::ParseError, "ALIVE inside a report list");
    }
    out.push_back(r);
  }
  if (!in.done()) throw Error(ErrorCode::ParseError, "trailing bits after END");
  return out;
}

CompactEngine::CompactEngine(const Adversary& adv, int horizon, int value_count, bool build_knowledge, bool debug)
    : adv_(adv),
      horizon_(horizon),
      fmt_(WireFormat::make(adv.n, value_count, horizon)),
      build_knowledge_(build_knowledge || debug),
      debug_(debug) {
  const int n = adv.n;
  const auto nn = static_cast<std::size_t>(n * n);
  states_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& s = states_[static_cast<std::size_t>(i)];
    s.known_value.assign(static_cast<std::size_t>(n), -1);
    s.known_value[static_cast<std::size_t>(i)] = adv.values[static_cast<std::size_t>(i)];
    s.min_crash_round.assign(static_cast<std::size_t>(n), 0);
    s.max_witnessed_level.assign(static_cast<std::size_t>(n), -1);
    s.max_witnessed_level[static_cast<std::size_t>(i)] = 0;
    s.value_sent.assign(static_cast<std::size_t>(n), 0);
    s.failed_reports.assign(static_cast<std::size_t>(n), 0);
    s.failed_round_sent.assign(static_cast<std::size_t>(n), 0);
    s.failed_flag_sent.assign(static_cast<std::size_t>(n), 0);
    s.sender_values.assign(static_cast<std::size_t>(n), 0);
    s.sender_failed.assign(nn, 0);
    s.sender_flag.assign(nn, 0);
  }
  bits_.assign(nn, 0);
  if (debug_) graph_.assign(adv, horizon);
  if (build_knowledge_) {
    knowledge_.resize(static_cast<std::size_t>(n * (horizon + 1)));
    for (int i = 0; i < n; ++i) build(i, 0, 0);
  }
}

std::vector<Report> CompactEngine::pending(int sender) const {
  const auto& s = states_[static_cast<std::size_t>(sender)];
  std::vector<Report> out;
  for (int j = 0; j < adv_.n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (s.known_value[ju] >= 0 && !s.value_sent[ju]) {
      out.push_back({ReportKind::Value, j, s.known_value[ju], false});
    }
  }
  for (int j = 0; j < adv_.n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const int c = s.min_crash_round[ju];
    if (c == 0) continue;
    const bool flag = s.max_witnessed_level[ju] == c - 1;
    if (c != s.failed_round_sent[ju] || flag != (s.failed_flag_sent[ju] != 0)) {
      out.push_back({ReportKind::FailedAt, j, c, flag});
    }
  }
  return out;
}

Bits CompactEngine::encode_round(int sender) {
  auto& s = states_[static_cast<std::size_t>(sender)];
  const auto reports = pending(sender);
  for (const auto& r : reports) {
    const auto ju = static_cast<std::size_t>(*r.subject);
    if (r.kind == ReportKind::Value && s.value_sent[ju] >= 1) {
      throw Error(ErrorCode::BudgetViolation, "second VALUE report for process " + std::to_string(*r.subject + 1));
    }
    if (r.kind == ReportKind::FailedAt && s.failed_reports[ju] >= 2) {
      throw Error(ErrorCode::BudgetViolation, "third FAILED_AT report for process " + std::to_string(*r.subject + 1));
    }
  }
  Bits out = encode_reports(fmt_, reports, s.failed_round_sent);
  for (const auto& r : reports) {
    const auto ju = static_cast<std::size_t>(*r.subject);
    if (r.kind == ReportKind::Value) {
      ++s.value_sent[ju];
    } else {
      ++s.failed_reports[ju];
      s.failed_round_sent[ju] = *r.payload;
      s.failed_flag_sent[ju] = r.witnessed ? 1 : 0;
    }
  }
  return out;
}

void CompactEngine::step() {
  const int n = adv_.n;
  const int m = round_ + 1;
  if (m > horizon_) throw Error(ErrorCode::HorizonTooShort, "no round after the horizon");
  std::vector<Mask> delivers(static_cast<std::size_t>(n), 0);
  for (const auto& c : adv_.pattern.crashes) delivers[static_cast<std::size_t>(c.process)] = c.delivers_to;

  std::vector<std::optional<Bits>> messages(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    if (active_at(adv_, s, m - 1)) messages[static_cast<std::size_t>(s)] = encode_round(s);
  }

  for (int r = 0; r < n; ++r) {
    if (!active_at(adv_, r, m)) continue;
    auto& st = states_[static_cast<std::size_t>(r)];
    Mask prev_vals = 0;
    for (int v : st.known_value) {
      if (v >= 0) prev_vals |= bit(v);
    }
    Mask heard = bit(r);
    std::vector<Value> learned(static_cast<std::size_t>(n), -1);
    for (int s = 0; s < n; ++s) {
      const auto& msg = messages[static_cast<std::size_t>(s)];
      if (s == r || !msg) continue;
      const int cs = adv_.crash_round(s);
      if (!(cs == 0 || cs > m || (cs == m && has(delivers[static_cast<std::size_t>(s)], r)))) continue;
      heard |= bit(s);
      bits_[static_cast<std::size_t>(s * n + r)] += msg->size();
      const std::size_t base = static_cast<std::size_t>(s * n);
      const std::vector<int> prior(st.sender_failed.begin() + static_cast<std::ptrdiff_t>(base),
                                   st.sender_failed.begin() + static_cast<std::ptrdiff_t>(base + static_cast<std::size_t>(n)));
      for (const auto& rep : decode_reports(fmt_, *msg, prior)) {
        if (rep.kind == ReportKind::Value) {
          st.sender_values[static_cast<std::size_t>(s)] |= bit(*rep.payload);
          learned[static_cast<std::size_t>(*rep.subject)] = *rep.payload;
        } else if (rep.kind == ReportKind::FailedAt) {
          st.sender_failed[base + static_cast<std::size_t>(*rep.subject)] = *rep.payload;
          st.sender_flag[base + static_cast<std::size_t>(*rep.subject)] = rep.witnessed ? 1 : 0;
        }
      }
    }

    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      if (st.known_value[ju] < 0) st.known_value[ju] = learned[ju];
      int level = st.max_witnessed_level[ju];
      int crash = st.min_crash_round[ju];
      for (Mask rest = heard & ~bit(r); rest != 0; rest &= rest - 1) {
        const int s = std::countr_zero(rest);
        const std::size_t slot = static_cast<std::size_t>(s * n + j);
        const int c = st.sender_failed[slot];
        int seen_by_s;  // latest level of j seen by <s,m-1>
        if (s == j) {
          seen_by_s = m - 1;
        } else if (c == 0) {
          seen_by_s = m - 2;
        } else {
          seen_by_s = st.sender_flag[slot] ? c - 1 : c - 2;
        }
        level = std::max(level, seen_by_s);
        if (c != 0 && (crash == 0 || c < crash)) crash = c;
      }
      if (!has(heard, j) && crash == 0) crash = m;
      st.max_witnessed_level[ju] = j == r ? m : level;
      st.min_crash_round[ju] = crash;
    }
    st.heard = heard;
    if (build_knowledge_) build(r, m, prev_vals);
  }
  round_ = m;
}

void CompactEngine::run() {
  while (round_ < horizon_) step();
}

void CompactEngine::build(int i, int m, Mask prev_vals) {
  const int n = adv_.n;
  if (!active_at(adv_, i, m)) return;
  const auto& st = states_[static_cast<std::size_t>(i)];
  Knowledge& k = knowledge_[static_cast<std::size_t>(i * (horizon_ + 1) + m)];
  const Mask all = all_processes(n);
  k.owner = {i, m};
  k.n = n;
  k.initial = st.known_value;
  k.vals = 0;
  for (int v : k.initial) {
    if (v >= 0) k.vals |= bit(v);
  }
  k.crashed_by = st.min_crash_round;
  k.crashed = proven(k.crashed_by, m);
  k.hidden_by_level.assign(static_cast<std::size_t>(m + 1), 0);
  k.capacity = n;
  for (int l = 0; l <= m; ++l) {
    Mask seen = 0;
    for (int j = 0; j < n; ++j) {
      if (st.max_witnessed_level[static_cast<std::size_t>(j)] >= l) seen |= bit(j);
    }
    const Mask h = all & ~seen & ~proven(k.crashed_by, l);
    k.hidden_by_level[static_cast<std::size_t>(l)] = h;
    k.capacity = std::min(k.capacity, popcount(h));
  }
  k.witness_vals.assign(static_cast<std::size_t>(n), 0);
  if (m > 0) {
    k.witnesses = st.heard;
    k.knownf = popcount(all & ~st.heard & ~bit(i));
    for (Mask rest = st.heard; rest != 0; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      k.witness_vals[static_cast<std::size_t>(j)] = j == i ? prev_vals : st.sender_values[static_cast<std::size_t>(j)];
    }
  } else {
    k.witnesses = 0;
    k.knownf = 0;
  }
  if (debug_) {
    const Knowledge full = summarize(graph_.view(i, m));
    if (!(full == k)) {
      throw Error(ErrorCode::ReconstructionMismatch, "node <" + std::to_string(i + 1) + "," + std::to_string(m) +
                                                         ">: " + mismatch_field(full, k) + " differ");
    }
  }
}

const Knowledge* CompactEngine::knowledge(int i, int m) const {
  if (!build_knowledge_ || m > round_ || !active_at(adv_, i, m)) return nullptr;
  return &knowledge_[static_cast<std::size_t>(i * (horizon_ + 1) + m)];
}

std::uint64_t CompactEngine::max_pair_bits() const { return bits_.empty() ? 0 : *std::max_element(bits_.begin(), bits_.end()); }

int CompactEngine::max_value_reports() const {
  int best = 0;
  for (const auto& s : states_) {
    for (char c : s.value_sent) best = std::max(best, static_cast<int>(c));
  }
  return best;
}

int CompactEngine::max_failed_reports() const {
  int best = 0;
  for (const auto& s : states_) {
    for (int c : s.failed_reports) best = std::max(best, c);
  }
  return best;
}

DecisionSchedule CompactEngine::decide(const ProtocolSpec& spec) const {
  DecisionSchedule out = empty_schedule(adv_, horizon_);
  for (int i = 0; i < adv_.n; ++i) {
    const Knowledge* prev = nullptr;
    for (int m = 0; m <= round_; ++m) {
      const Knowledge* now = knowledge(i, m);
      if (!now) break;
      if (auto d = unbeat::decide(spec, *now, prev)) {
        out.decisions[static_cast<std::size_t>(i)] = Decision{m, *d};
        break;
      }
      prev = now;
    }
  }
  return out;
}

DecisionSchedule decode_and_decide(const ProtocolSpec& spec, const Adversary& adv, int horizon, bool debug) {
  CompactEngine engine(adv, horizon, spec.value_count, true, debug);
  engine.run();
  return engine.decide(spec);
}

std::vector<ProtocolSpec> codec_protocols(const EnumerationDomain& dom) {
  std::vector<ProtocolSpec> out;
  for (ProtocolId id : all_protocols()) {
    const bool with_k = id == ProtocolId::OptMinK || id == ProtocolId::UProtMinK;
    for (int k = 1; k <= (with_k ? dom.value_count - 1 : 1); ++k) {
      ProtocolSpec spec{id, with_k ? std::optional<int>(k) : std::nullopt, dom.value_count, dom.t, dom.n};
      try {
        spec.validate();
      } catch (const Error&) {
        continue;
      }
      out.push_back(spec);
    }
  }
  return out;
}

CodecSweep codec_sweep(const EnumerationDomain& dom, const std::vector<ProtocolSpec>& protocols, int workers) {
  const AdversarySpace space(dom);
  struct Part {
    std::uint64_t mismatches = 0;
    std::optional<CodecMismatch> first;
    std::uint64_t bits = 0;
    int values = 0;
    int failed = 0;
  };
  constexpr std::uint64_t kChunk = 256;
  std::vector<Part> parts(chunk_count(space.size(), kChunk));
  parallel_chunks(space.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    Part& part = parts[chunk];
    Simulator sim;
    DecisionSchedule full;
    Adversary adv;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      space.at_into(idx, adv);
      CompactEngine engine(adv, dom.horizon, dom.value_count, true, true);
      engine.run();
      part.bits = std::max(part.bits, engine.max_pair_bits());
      part.values = std::max(part.values, engine.max_value_reports());
      part.failed = std::max(part.failed, engine.max_failed_reports());
      for (const auto& spec : protocols) {
        sim.run(spec, adv, dom.horizon, full);
        if (engine.decide(spec) == full) continue;
        ++part.mismatches;
        if (!part.first) part.first = CodecMismatch{idx, spec};
      }
    }
  });
  CodecSweep out;
  out.domain = dom;
  out.protocols = protocols;
  out.adversaries = space.size();
  for (const auto& p : parts) {
    out.schedule_mismatches += p.mismatches;
    if (!out.first_mismatch && p.first) out.first_mismatch = p.first;
    out.max_pair_bits = std::max(out.max_pair_bits, p.bits);
    out.max_value_reports = std::max(out.max_value_reports, p.values);
    out.max_failed_reports = std::max(out.max_failed_reports, p.failed);
  }
  return out;
}

Adversary random_adversary(int n, int t, int value_count, int horizon, std::mt19937_64& rng) {
  Adversary adv;
  adv.n = n;
  adv.pattern.t = t;
  std::uniform_int_distribution<int> value(0, value_count - 1);
  for (int i = 0; i < n; ++i) adv.values.push_back(value(rng));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int f = std::uniform_int_distribution<int>(0, t)(rng);
  std::uniform_int_distribution<int> round(1, horizon + 1);
  for (int c = 0; c < f; ++c) {
    const int p = order[static_cast<std::size_t>(c)];
    adv.pattern.crashes.push_back({p, round(rng), rng() & all_processes(n) & ~bit(p)});
  }
  std::sort(adv.pattern.crashes.begin(), adv.pattern.crashes.end(),
            [](const Crash& a, const Crash& b) { return a.process < b.process; });
  return adv;
}

BitBudgetCheck bit_budget_check(int n, int samples, std::uint64_t seed, int workers) {
  struct Part {
    std::uint64_t bits = 0;
    int values = 0;
    int failed = 0;
  };
  constexpr std::uint64_t kChunk = 16;
  const auto count = static_cast<std::uint64_t>(samples);
  std::vector<Part> parts(chunk_count(count, kChunk));
  parallel_chunks(count, kChunk, workers, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
    Part& part = parts[chunk];
    for (std::uint64_t s = begin; s < end; ++s) {
      std::mt19937_64 rng(seed + s);
      const Adversary adv = random_adversary(n, n - 1, 2, n, rng);
      CompactEngine engine(adv, n, 2, false, false);
      engine.run();
      part.bits = std::max(part.bits, engine.max_pair_bits());
      part.values = std::max(part.values, engine.max_value_reports());
      part.failed = std::max(part.failed, engine.max_failed_reports());
    }
  });
  BitBudgetCheck out;
  out.n = n;
  out.samples = samples;
  out.budget = codec_bit_budget(n);
  for (const auto& p : parts) {
    out.max_pair_bits = std::max(out.max_pair_bits, p.bits);
    out.max_value_reports = std::max(out.max_value_reports, p.values);
    out.max_failed_reports = std::max(out.max_failed_reports, p.failed);
  }
  return out;
}

}  // namespace unbeat
