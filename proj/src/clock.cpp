#include "refcrdt/clock.hpp"

#include <algorithm>

namespace refcrdt {

void VectorClock::set(ReplicaId r, std::uint32_t count) {
  if (r.value >= counts_.size()) counts_.resize(r.value + 1, 0);
  counts_[r.value] = count;
}

bool VectorClock::leq(const VectorClock& other) const {
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] > other[ReplicaId{static_cast<std::uint32_t>(i)}]) return false;
  }
  return true;
}

void VectorClock::merge(const VectorClock& other) {
  if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), 0);
  for (std::size_t i = 0; i < other.counts_.size(); ++i) {
    counts_[i] = std::max(counts_[i], other.counts_[i]);
  }
}

VectorClock VectorClock::pointwise_min(std::span<const VectorClock> clocks) {
  if (clocks.empty()) return {};
  std::size_t n = 0;
  for (const auto& c : clocks) n = std::max(n, c.size());
  VectorClock out(n);
  for (std::size_t i = 0; i < n; ++i) {
    ReplicaId r{static_cast<std::uint32_t>(i)};
    std::uint32_t m = clocks.front()[r];
    for (const auto& c : clocks) m = std::min(m, c[r]);
    out.counts_[i] = m;
  }
  return out;
}

bool VectorClock::operator==(const VectorClock& other) const {
  std::size_t n = std::max(counts_.size(), other.counts_.size());
  for (std::size_t i = 0; i < n; ++i) {
    ReplicaId r{static_cast<std::uint32_t>(i)};
    if ((*this)[r] != other[r]) return false;
  }
  return true;
}

bool CausalCut::leq(const CausalCut& other) const {
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (positions_[i] > other.positions_.at(i)) return false;
  }
  return true;
}

void CausalCut::merge(const CausalCut& other) {
  if (positions_.size() < other.positions_.size()) positions_.resize(other.positions_.size());
  for (std::size_t i = 0; i < other.positions_.size(); ++i) {
    positions_[i] = std::max(positions_[i], other.positions_[i]);
  }
}

VectorClock CausalCut::complete() const {
  VectorClock c(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    c.set(ReplicaId{static_cast<std::uint32_t>(i)}, positions_[i].events);
  }
  return c;
}

std::string CausalCut::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(positions_[i].events);
    if (positions_[i].prefix) s += "+" + std::to_string(positions_[i].prefix);
  }
  return s + "]";
}

}  // namespace refcrdt
