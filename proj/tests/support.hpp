#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "refcrdt/world.hpp"

namespace refcrdt::testing {

inline ReplicaId R(std::uint32_t i) { return ReplicaId{i}; }

inline EventId ev(const Outcome& o) { return std::get<EventId>(o); }

inline ObjectKey create_root(World& w, ReplicaId at, std::vector<std::string> attrs) {
  const EventId e = ev(w.generate(at, op::CreateObject{true, std::move(attrs), "", {}, {}}));
  return key_minted_by(e);
}

inline ObjectKey create_at(World& w, ReplicaId at, Slot anchor, std::vector<std::string> attrs) {
  const EventId e = ev(w.generate(at, op::CreateObject{false, std::move(attrs), "", {}, anchor}));
  return key_minted_by(e);
}

inline ObjectKey create_loose(World& w, ReplicaId at, std::vector<std::string> attrs) {
  const EventId e = ev(w.generate(at, op::CreateObject{false, std::move(attrs), "", {}, {}}));
  return key_minted_by(e);
}

/// Targets of the non-NULL entries of one slot, sorted.
inline std::multiset<ObjectKey> targets(const World& w, ReplicaId r, Slot s) {
  std::multiset<ObjectKey> out;
  for (const auto& e : w.replica(r).objects.at(s.object).attrs.at(s.attr).entries) {
    if (e.target) out.insert(*e.target);
  }
  return out;
}

inline std::size_t null_entries(const World& w, ReplicaId r, Slot s) {
  std::size_t n = 0;
  for (const auto& e : w.replica(r).objects.at(s.object).attrs.at(s.attr).entries) n += e.is_null();
  return n;
}

/// Applies the outstanding data messages in every causal order, visiting
/// each distinct state once, and calls `leaf` on every state where nothing
/// more can be delivered. Gossip is left alone. Returns the number of
/// distinct states visited.
inline std::size_t for_each_delivery_order(const World& w,
                                           const std::function<void(const World&)>& leaf) {
  std::set<std::string> seen;
  std::function<void(const World&)> visit = [&](const World& at) {
    if (!seen.insert(at.state_key()).second) return;
    bool any = false;
    for (std::uint32_t r = 0; r < at.replica_count(); ++r) {
      for (std::uint32_t o = 0; o < at.replica_count(); ++o) {
        auto next = at.next_message(R(r), R(o));
        if (!next || !at.deliverable(R(r), *next)) continue;
        any = true;
        World copy = at;
        copy.deliver(R(r), *next);
        visit(copy);
      }
    }
    if (!any) leaf(at);
  };
  visit(w);
  return seen.size();
}

}  // namespace refcrdt::testing
