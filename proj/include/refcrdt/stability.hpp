#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "refcrdt/clock.hpp"
#include "refcrdt/ids.hpp"
#include "refcrdt/refs.hpp"

namespace refcrdt {

class World;

/// A deletion question: is `listing_within(target, last)` stably true?
struct QueryKey {
  ObjectKey target;
  LastRefs last;

  auto operator<=>(const QueryKey&) const = default;
};

struct ConditionReport {
  QueryKey query;
  bool holds = false;

  bool operator==(const ConditionReport&) const = default;
};

/// Progress gossip. `cut` is the announcer's applied cut at the moment the
/// reports were evaluated.
struct ClockAnnouncement {
  ReplicaId from;
  CausalCut cut;
  std::vector<ConditionReport> reports;

  bool operator==(const ClockAnnouncement&) const = default;
};

/// Tells other replicas to start reporting on a query.
struct QueryRegistration {
  ReplicaId from;
  QueryKey query;

  bool operator==(const QueryRegistration&) const = default;
};

/// Latest announced complete-event clock of every replica, as known by one
/// observer.
class StableFrontier {
 public:
  StableFrontier() = default;
  explicit StableFrontier(std::size_t replicas)
      : latest_(replicas, VectorClock(replicas)) {}

  void observe(ReplicaId from, const VectorClock& clock);
  const VectorClock& latest(ReplicaId r) const { return latest_.at(r.value); }
  std::size_t replicas() const { return latest_.size(); }
  /// Pointwise minimum over all replicas; never decreases.
  VectorClock glb() const;

  bool operator==(const StableFrontier&) const = default;

 private:
  std::vector<VectorClock> latest_;
};

enum class QueryPhase { collecting, confirming, stable, refuted };

/// Two-phase stability detection for one query at its querier.
///
/// collecting: wait for a true report from every replica (cuts c_i).
/// confirming: wait for a true report from every replica at cuts d_i with
///   every d_i equal to one cut D ≥ sup c_i. Unequal cuts restart the
///   confirmation against their supremum.
/// Any false report moves to refuted, which collects afresh.
struct StabilityQuery {
  QueryKey key;
  QueryPhase phase = QueryPhase::collecting;
  std::map<ReplicaId, CausalCut> collected;
  CausalCut target;
  std::map<ReplicaId, CausalCut> confirmed;

  void on_report(ReplicaId from, const CausalCut& cut, bool holds, std::size_t replicas);

  bool operator==(const StabilityQuery&) const = default;
};

/// Replica-local stability bookkeeping. Not replicated and not part of the
/// converged object state.
struct StabilityState {
  std::set<QueryKey> known;                // queries this replica reports on
  std::map<QueryKey, StabilityQuery> own;  // queries this replica asked
  StableFrontier frontier;

  bool operator==(const StabilityState&) const = default;
};

/// The per-replica condition: target exists, is not a root, and its listing
/// only holds self references named in `last`.
bool condition_holds(const ObjectStore& store, const QueryKey& q);

ClockAnnouncement make_announcement(ReplicaId from, const ObjectStore& store,
                                    const CausalCut& cut, const StabilityState& state);

void receive_announcement(StabilityState& state, const ClockAnnouncement& a,
                          std::size_t replicas);

/// Distributed answer at one replica: the query reached the stable phase.
bool stably_subset(const StabilityState& state, const QueryKey& q);

/// Omniscient ground truth over the whole world: the condition holds at
/// every replica, no generated effector that some replica has not applied
/// would add a listing pair outside the condition, and no outref entry
/// anywhere targets the object except ignored self references.
bool oracle_stable(const World& world, const QueryKey& q);

}  // namespace refcrdt
