#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "refcrdt/ids.hpp"

namespace refcrdt {

/// Per-replica event counts. Missing entries read as zero; the order is
/// pointwise and merge is pointwise max.
class VectorClock {
 public:
  VectorClock() = default;
  explicit VectorClock(std::size_t replicas) : counts_(replicas, 0) {}

  std::uint32_t operator[](ReplicaId r) const {
    return r.value < counts_.size() ? counts_[r.value] : 0;
  }
  void set(ReplicaId r, std::uint32_t count);
  std::size_t size() const { return counts_.size(); }

  bool leq(const VectorClock& other) const;
  void merge(const VectorClock& other);

  static VectorClock pointwise_min(std::span<const VectorClock> clocks);

  bool operator==(const VectorClock& other) const;

 private:
  std::vector<std::uint32_t> counts_;
};

/// How far one origin's stream has been applied: `events` complete events,
/// plus `prefix` effectors of the next one. Ordered lexicographically,
/// which is the delivery order of that origin's effectors.
struct ChainPosition {
  std::uint32_t events = 0;
  std::uint32_t prefix = 0;

  auto operator<=>(const ChainPosition&) const = default;
};

/// A causally closed set of applied effectors, one ChainPosition per origin.
/// Events generated while an origin chain is only partially visible depend on
/// the visible prefix, so dependencies are recorded at this granularity.
class CausalCut {
 public:
  CausalCut() = default;
  explicit CausalCut(std::size_t replicas) : positions_(replicas) {}

  const ChainPosition& operator[](ReplicaId r) const { return positions_.at(r.value); }
  ChainPosition& operator[](ReplicaId r) { return positions_.at(r.value); }
  std::size_t size() const { return positions_.size(); }

  bool leq(const CausalCut& other) const;
  void merge(const CausalCut& other);

  /// Complete events only.
  VectorClock complete() const;

  std::string to_string() const;

  auto operator<=>(const CausalCut&) const = default;

 private:
  std::vector<ChainPosition> positions_;
};

}  // namespace refcrdt
