#include "refcrdt/stability.hpp"

#include <algorithm>

#include "refcrdt/world.hpp"

namespace refcrdt {

void StableFrontier::observe(ReplicaId from, const VectorClock& clock) {
  latest_.at(from.value).merge(clock);
}

VectorClock StableFrontier::glb() const { return VectorClock::pointwise_min(latest_); }

void StabilityQuery::on_report(ReplicaId from, const CausalCut& cut, bool holds,
                               std::size_t replicas) {
  if (phase == QueryPhase::stable) return;
  if (!holds) {
    phase = QueryPhase::refuted;
    collected.clear();
    confirmed.clear();
    target = CausalCut{};
    return;
  }
  if (phase != QueryPhase::confirming) {
    phase = QueryPhase::collecting;
    collected[from] = cut;
    if (collected.size() == replicas) {
      target = CausalCut(cut.size());
      for (const auto& [r, c] : collected) target.merge(c);
      confirmed.clear();
      phase = QueryPhase::confirming;
    }
    return;
  }
  // Reports from before the collection supremum prove nothing new.
  if (!target.leq(cut)) return;
  confirmed[from] = cut;
  if (confirmed.size() < replicas) return;
  const CausalCut& first = confirmed.begin()->second;
  const bool agreed = std::all_of(confirmed.begin(), confirmed.end(),
                                  [&](const auto& kv) { return kv.second == first; });
  if (agreed) {
    phase = QueryPhase::stable;
    return;
  }
  // Someone moved on between reports; confirm again at the new supremum.
  for (const auto& [r, c] : confirmed) target.merge(c);
  confirmed.clear();
}

bool condition_holds(const ObjectStore& store, const QueryKey& q) {
  auto it = store.find(q.target);
  if (it == store.end() || it->second.root) return false;
  return listing_within(it->second, q.last);
}

ClockAnnouncement make_announcement(ReplicaId from, const ObjectStore& store,
                                    const CausalCut& cut, const StabilityState& state) {
  ClockAnnouncement a{from, cut, {}};
  a.reports.reserve(state.known.size());
  for (const auto& q : state.known) a.reports.push_back({q, condition_holds(store, q)});
  return a;
}

void receive_announcement(StabilityState& state, const ClockAnnouncement& a,
                          std::size_t replicas) {
  state.frontier.observe(a.from, a.cut.complete());
  for (const auto& report : a.reports) {
    auto it = state.own.find(report.query);
    if (it != state.own.end()) it->second.on_report(a.from, a.cut, report.holds, replicas);
  }
}

bool stably_subset(const StabilityState& state, const QueryKey& q) {
  auto it = state.own.find(q);
  return it != state.own.end() && it->second.phase == QueryPhase::stable;
}

bool oracle_stable(const World& world, const QueryKey& q) {
  const auto ignored = [&](const InRefPair& p) {
    return p.source == q.target && q.last.contains(p.ref);
  };
  const std::uint32_t n = world.replica_count();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!condition_holds(world.replica(ReplicaId{i}).objects, q)) return false;
  }
  const bool atomic = world.config().mode == CompositionMode::atomic;
  for (std::uint32_t o = 0; o < n; ++o) {
    for (const Event& e : world.events(ReplicaId{o})) {
      for (std::uint32_t k = 0; k < e.chain.size(); ++k) {
        const auto* add = std::get_if<fx::InrefAdd>(&e.chain[k]);
        if (!add || add->target != q.target || ignored(add->pair)) continue;
        const MessageRef msg{e.id, atomic ? 0u : k};
        for (std::uint32_t i = 0; i < n; ++i) {
          if (!world.applied(ReplicaId{i}, msg)) return false;
        }
      }
    }
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& [key, obj] : world.replica(ReplicaId{i}).objects) {
      for (const auto& [name, out] : obj.attrs) {
        for (const auto& e : out.entries) {
          if (e.target == q.target && !ignored(InRefPair{key, *e.ref})) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace refcrdt
