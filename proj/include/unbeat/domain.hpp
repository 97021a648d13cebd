#pragma once

// Finite adversary spaces and a deterministic parallel sweep helper.

#include <cstdint>
#include <functional>
#include <vector>

#include "unbeat/model.hpp"

namespace unbeat {

struct EnumerationDomain {
  int n = 2;
  int t = 0;
  int value_count = 2;
  int horizon = 1;

  static EnumerationDomain standard(int n, int t, int value_count) { return {n, t, value_count, t + 1}; }

  /// Throws Error{DomainTooLarge} beyond n <= 5, horizon <= 4 (when guarded),
  /// Error{InvalidAdversary} for malformed parameters.
  void validate(bool guard = true) const;
  bool operator==(const EnumerationDomain&) const = default;
};

/// Every adversary of a domain: values in V^n, at most t faulty processes,
/// crash rounds 1..horizon+1 and every delivered subset. Index =
/// pattern_index * |V|^n + value_index, so any adversary is addressable.
class AdversarySpace {
 public:
  explicit AdversarySpace(const EnumerationDomain& dom, bool guard = true);

  const EnumerationDomain& domain() const { return dom_; }
  std::uint64_t size() const { return patterns_.size() * value_vectors_; }
  std::uint64_t pattern_count() const { return patterns_.size(); }
  std::uint64_t value_vectors() const { return value_vectors_; }
  const FailurePattern& pattern(std::uint64_t p) const { return patterns_[p]; }

  Adversary at(std::uint64_t index) const;
  void at_into(std::uint64_t index, Adversary& out) const;

 private:
  EnumerationDomain dom_;
  std::uint64_t value_vectors_ = 1;
  std::vector<FailurePattern> patterns_;
};

/// Materializes the whole space in index order.
std::vector<Adversary> enumerate_adversaries(const EnumerationDomain& dom);

/// Closed-form size of the space (no materialization).
std::uint64_t adversary_count(const EnumerationDomain& dom);

int default_workers();

/// Splits [0, count) into fixed chunks (independent of `workers`) and calls
/// body(chunk, begin, end) for each, on up to `workers` threads. Callers
/// store per-chunk results and merge them in chunk order.
std::size_t chunk_count(std::uint64_t count, std::uint64_t chunk_size);
void parallel_chunks(std::uint64_t count, std::uint64_t chunk_size, int workers,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body);

}  // namespace unbeat
