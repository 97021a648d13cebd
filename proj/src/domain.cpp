#include "unbeat/domain.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "unbeat/errors.hpp"

namespace unbeat {

void EnumerationDomain::validate(bool guard) const {
  if (n < 2 || n > kMaxProcesses) throw Error(ErrorCode::InvalidAdversary, "n out of range");
  if (t < 0 || t > n - 1) throw Error(ErrorCode::InvalidAdversary, "t must lie in 0..n-1");
  if (value_count < 2) throw Error(ErrorCode::InvalidAdversary, "at least two values required");
  if (horizon < t + 1) throw Error(ErrorCode::HorizonTooShort, "horizon must be at least t+1");
  if (guard && (n > 5 || horizon > 4)) {
    throw Error(ErrorCode::DomainTooLarge, "exhaustive domains are limited to n <= 5, horizon <= 4");
  }
}

AdversarySpace::AdversarySpace(const EnumerationDomain& dom, bool guard) : dom_(dom) {
  dom.validate(guard);
  for (int j = 0; j < dom.n; ++j) value_vectors_ *= static_cast<std::uint64_t>(dom.value_count);

  // Per-process options: 0 = no crash, else (round, delivered subset of others).
  const int subsets = 1 << (dom.n - 1);
  const int options = 1 + (dom.horizon + 1) * subsets;
  auto decode = [&](int j, int option) {
    const int o = option - 1;
    const int round = o / subsets + 1;
    const int sub = o % subsets;
    Mask to = 0;
    for (int b = 0, q = 0; q < dom.n; ++q) {
      if (q == j) continue;
      if ((sub >> b) & 1) to |= bit(q);
      ++b;
    }
    return Crash{j, round, to};
  };
  std::vector<int> digit(static_cast<std::size_t>(dom.n), 0);
  while (true) {
    int faulty = 0;
    for (int d : digit) faulty += d != 0;
    if (faulty <= dom.t) {
      FailurePattern p;
      p.t = dom.t;
      for (int j = 0; j < dom.n; ++j) {
        if (digit[static_cast<std::size_t>(j)] != 0) p.crashes.push_back(decode(j, digit[static_cast<std::size_t>(j)]));
      }
      patterns_.push_back(std::move(p));
    }
    int pos = dom.n - 1;
    while (pos >= 0 && ++digit[static_cast<std::size_t>(pos)] == options) digit[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
}

void AdversarySpace::at_into(std::uint64_t index, Adversary& out) const {
  out.n = dom_.n;
  out.pattern = patterns_[index / value_vectors_];
  std::uint64_t v = index % value_vectors_;
  out.values.assign(static_cast<std::size_t>(dom_.n), 0);
  for (int j = dom_.n - 1; j >= 0; --j) {
    out.values[static_cast<std::size_t>(j)] = static_cast<Value>(v % static_cast<std::uint64_t>(dom_.value_count));
    v /= static_cast<std::uint64_t>(dom_.value_count);
  }
}

Adversary AdversarySpace::at(std::uint64_t index) const {
  Adversary a;
  at_into(index, a);
  return a;
}

std::vector<Adversary> enumerate_adversaries(const EnumerationDomain& dom) {
  AdversarySpace space(dom);
  std::vector<Adversary> out(space.size());
  for (std::uint64_t i = 0; i < space.size(); ++i) space.at_into(i, out[i]);
  return out;
}

std::uint64_t adversary_count(const EnumerationDomain& dom) {
  // sum over faulty-set sizes s <= t of C(n,s) * ((horizon+1) * 2^(n-1))^s, times |V|^n
  const std::uint64_t per = static_cast<std::uint64_t>(dom.horizon + 1) << (dom.n - 1);
  std::uint64_t patterns = 0;
  std::uint64_t binom = 1;
  std::uint64_t power = 1;
  for (int s = 0; s <= dom.t; ++s) {
    patterns += binom * power;
    binom = binom * static_cast<std::uint64_t>(dom.n - s) / static_cast<std::uint64_t>(s + 1);
    power *= per;
  }
  std::uint64_t values = 1;
  for (int j = 0; j < dom.n; ++j) values *= static_cast<std::uint64_t>(dom.value_count);
  return patterns * values;
}

int default_workers() { return std::max(1U, std::thread::hardware_concurrency()); }

std::size_t chunk_count(std::uint64_t count, std::uint64_t chunk_size) {
  return static_cast<std::size_t>((count + chunk_size - 1) / chunk_size);
}

void parallel_chunks(std::uint64_t count, std::uint64_t chunk_size, int workers,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body) {
  const std::size_t chunks = chunk_count(count, chunk_size);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        const std::uint64_t begin = c * chunk_size;
        body(c, begin, std::min(count, begin + chunk_size));
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace unbeat
