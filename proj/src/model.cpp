#include "unbeat/model.hpp"

#include <algorithm>

#include "unbeat/errors.hpp"

namespace unbeat {

int Adversary::crash_round(int j) const {
  for (const auto& c : pattern.crashes) {
    if (c.process == j) return c.round;
  }
  return 0;
}

Mask Adversary::faulty() const {
  Mask m = 0;
  for (const auto& c : pattern.crashes) m |= bit(c.process);
  return m;
}

void validate_adversary(const Adversary& adv, int value_count) {
  auto fail = [](ErrorCode code, const std::string& msg) { throw Error(code, msg); };
  if (adv.n < 2 || adv.n > kMaxProcesses) {
    fail(ErrorCode::InvalidAdversary, "n must lie in 2.." + std::to_string(kMaxProcesses));
  }
  if (static_cast<int>(adv.values.size()) != adv.n) {
    fail(ErrorCode::InvalidAdversary, "expected " + std::to_string(adv.n) + " initial values");
  }
  if (adv.pattern.t < 0 || adv.pattern.t > adv.n - 1) {
    fail(ErrorCode::InvalidAdversary, "t must lie in 0..n-1");
  }
  for (int j = 0; j < adv.n; ++j) {
    auto v = adv.values[static_cast<std::size_t>(j)];
    if (v < 0 || v >= value_count) {
      fail(ErrorCode::ValueOutOfRange,
           "process " + std::to_string(j + 1) + " has value " + std::to_string(v));
    }
  }
  Mask crashed = 0;
  for (const auto& c : adv.pattern.crashes) {
    if (c.process < 0 || c.process >= adv.n) {
      fail(ErrorCode::InvalidAdversary, "crash of unknown process");
    }
    if (c.round < 1) fail(ErrorCode::InvalidAdversary, "crash rounds start at 1");
    if ((c.delivers_to & ~all_processes(adv.n)) != 0) {
      fail(ErrorCode::InvalidAdversary, "delivers_to names an unknown process");
    }
    if (has(c.delivers_to, c.process)) {
      fail(ErrorCode::SelfDelivery, "process " + std::to_string(c.process + 1) +
                                        " lists itself in delivers_to");
    }
    if (has(crashed, c.process)) {
      fail(ErrorCode::DuplicateCrash, "process " + std::to_string(c.process + 1));
    }
    crashed |= bit(c.process);
  }
  if (adv.failures() > adv.pattern.t) {
    fail(ErrorCode::TooManyCrashes, std::to_string(adv.failures()) + " crashes exceed t=" +
                                        std::to_string(adv.pattern.t));
  }
}

bool active_at(const Adversary& adv, int i, int m) {
  int c = adv.crash_round(i);
  return c == 0 || c > m;
}

std::vector<Node> View::seen_nodes() const {
  std::vector<Node> out;
  for (int l = 0; l <= time_; ++l) {
    for (int j = 0; j < n_; ++j) {
      if (has(seen_at(l), j)) out.push_back({j, l});
    }
  }
  return out;
}

std::vector<std::pair<Node, Node>> View::edges() const {
  std::vector<std::pair<Node, Node>> out;
  for (int l = 1; l <= time_; ++l) {
    for (int j = 0; j < n_; ++j) {
      Mask in = in_edges(l, j);
      for (int s = 0; s < n_; ++s) {
        if (has(in, s)) out.push_back({{s, l - 1}, {j, l}});
      }
    }
  }
  return out;
}

std::string View::fingerprint() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(3 + 8 * (time_ + 1) * (n_ + 1) + n_));
  auto put_mask = [&out](Mask m) {
    for (int b = 7; b >= 0; --b) out.push_back(static_cast<char>((m >> (8 * b)) & 0xFF));
  };
  out.push_back(static_cast<char>(n_));
  out.push_back(static_cast<char>(owner_));
  out.push_back(static_cast<char>(time_));
  for (int l = 0; l <= time_; ++l) put_mask(seen_at(l));
  for (int l = 1; l <= time_; ++l) {
    for (int j = 0; j < n_; ++j) {
      if (has(seen_at(l), j)) put_mask(in_edges(l, j));
    }
  }
  for (int j = 0; j < n_; ++j) {
    if (has(seen_at(0), j)) out.push_back(static_cast<char>(initial_[static_cast<std::size_t>(j)]));
  }
  return out;
}

void CommunicationGraph::assign(const Adversary& adv, int depth) {
  n_ = adv.n;
  depth_ = depth;
  values_ = adv.values;
  const auto levels = static_cast<std::size_t>(depth + 1);
  active_.assign(levels, 0);
  recv_.assign(levels * static_cast<std::size_t>(n_), 0);

  std::vector<int> crash(static_cast<std::size_t>(n_), 0);
  std::vector<Mask> delivers(static_cast<std::size_t>(n_), 0);
  for (const auto& c : adv.pattern.crashes) {
    crash[static_cast<std::size_t>(c.process)] = c.round;
    delivers[static_cast<std::size_t>(c.process)] = c.delivers_to;
  }
  for (int m = 0; m <= depth; ++m) {
    Mask a = 0;
    for (int j = 0; j < n_; ++j) {
      int c = crash[static_cast<std::size_t>(j)];
      if (c == 0 || c > m) a |= bit(j);
    }
    active_[static_cast<std::size_t>(m)] = a;
  }
  for (int l = 1; l <= depth; ++l) {
    Mask senders = active(l);  // active at l: sends round l to everyone
    for (int j = 0; j < n_; ++j) {
      if (!has(active(l), j)) continue;
      Mask in = senders;
      for (int s = 0; s < n_; ++s) {
        if (crash[static_cast<std::size_t>(s)] == l && has(delivers[static_cast<std::size_t>(s)], j)) {
          in |= bit(s);
        }
      }
      recv_[static_cast<std::size_t>(l * n_ + j)] = in;
    }
  }
}

void CommunicationGraph::view_into(int i, int m, View& out) const {
  if (m < 0 || m > depth_ || i < 0 || i >= n_ || !has(active(m), i)) {
    throw Error(ErrorCode::InactiveProcess, "process " + std::to_string(i + 1) +
                                                " does not exist at time " + std::to_string(m));
  }
  out.n_ = n_;
  out.owner_ = i;
  out.time_ = m;
  out.seen_.assign(static_cast<std::size_t>(m + 1), 0);
  out.in_.assign(static_cast<std::size_t>((m + 1) * n_), 0);
  out.seen_[static_cast<std::size_t>(m)] = bit(i);
  for (int l = m; l >= 1; --l) {
    Mask below = 0;
    Mask here = out.seen_[static_cast<std::size_t>(l)];
    for (Mask rest = here; rest != 0; rest &= rest - 1) {
      int j = std::countr_zero(rest);
      Mask in = received(l, j);
      out.in_[static_cast<std::size_t>(l * n_ + j)] = in;
      below |= in;
    }
    out.seen_[static_cast<std::size_t>(l - 1)] = below;
  }
  out.initial_.assign(static_cast<std::size_t>(n_), -1);
  for (Mask rest = out.seen_[0]; rest != 0; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    out.initial_[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(values_[static_cast<std::size_t>(j)]);
  }
}

View CommunicationGraph::view(int i, int m) const {
  View v;
  view_into(i, m, v);
  return v;
}

bool seen(const Adversary& adv, Node src, Node dst) {
  for (Node node : {src, dst}) {
    if (node.time < 0 || node.process < 0 || node.process >= adv.n ||
        !active_at(adv, node.process, node.time)) {
      throw Error(ErrorCode::NonexistentNode, "<" + std::to_string(node.process + 1) + "," +
                                                  std::to_string(node.time) + ">");
    }
  }
  if (src.time > dst.time) return false;
  CommunicationGraph g(adv, dst.time);
  return g.view(dst.process, dst.time).sees(src);
}

View view(const Adversary& adv, int i, int m) {
  if (m < 0) throw Error(ErrorCode::InactiveProcess, "negative time");
  return CommunicationGraph(adv, m).view(i, m);
}

int DecisionSchedule::last_decision_time(Mask among) const {
  int last = -1;
  for (int j = 0; j < n; ++j) {
    const auto& d = decisions[static_cast<std::size_t>(j)];
    if (has(among, j) && d) last = std::max(last, d->time);
  }
  return last;
}

DecisionSchedule empty_schedule(const Adversary& adv, int horizon) {
  DecisionSchedule s;
  s.n = adv.n;
  s.horizon = horizon;
  s.decisions.assign(static_cast<std::size_t>(adv.n), std::nullopt);
  s.crash_round.assign(static_cast<std::size_t>(adv.n), std::nullopt);
  for (const auto& c : adv.pattern.crashes) s.crash_round[static_cast<std::size_t>(c.process)] = c.round;
  return s;
}

DecisionSchedule simulate(const DecisionRule& rule, const Adversary& adv, int horizon) {
  DecisionSchedule s = empty_schedule(adv, horizon);
  CommunicationGraph g(adv, horizon);
  View now;
  View prev;
  for (int i = 0; i < adv.n; ++i) {
    for (int m = 0; m <= horizon && has(g.active(m), i); ++m) {
      g.view_into(i, m, now);
      auto d = rule(now, m == 0 ? nullptr : &prev);
      if (d) {
        s.decisions[static_cast<std::size_t>(i)] = Decision{m, *d};
        break;
      }
      std::swap(now, prev);
    }
  }
  return s;
}

}  // namespace unbeat
