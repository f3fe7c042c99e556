#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "refcrdt/clock.hpp"
#include "refcrdt/effector.hpp"
#include "refcrdt/generator.hpp"
#include "refcrdt/operation.hpp"
#include "refcrdt/stability.hpp"
#include "refcrdt/step.hpp"

namespace refcrdt {

/// How a generator's chain travels downstream.
///   atomic:      one message applies the whole chain
///   pure_causal: one message per effector, applied in chain order
enum class CompositionMode { atomic, pure_causal };

std::string_view to_string(CompositionMode m);
std::optional<CompositionMode> mode_from_string(std::string_view s);
std::string_view to_string(Fault f);
std::optional<Fault> fault_from_string(std::string_view s);

struct WorldConfig {
  std::uint32_t replicas = 3;
  CompositionMode mode = CompositionMode::pure_causal;
  Fault fault = Fault::none;

  bool operator==(const WorldConfig&) const = default;
};

struct Event {
  EventId id;
  Operation op;
  CausalCut deps;  // origin's applied cut at generation
  std::vector<Effector> chain;
};

/// Addresses one downstream message of an event. In atomic mode only
/// chain_index 0 exists.
struct MessageRef {
  EventId event;
  std::uint32_t chain_index = 0;

  auto operator<=>(const MessageRef&) const = default;
};

struct GossipMessage {
  std::uint64_t id = 0;
  ReplicaId from;
  ReplicaId to;
  CausalCut sent_at;  // delivered only once the receiver has applied this
  std::variant<QueryRegistration, ClockAnnouncement> body;
};

struct Replica {
  ReplicaId id;
  ObjectStore objects;
  CausalCut applied;
  std::vector<MessageRef> buffer;  // received but not yet deliverable
  StabilityState stability;
};

struct DuplicateDelivery : std::logic_error {
  using std::logic_error::logic_error;
};
struct Stuck : std::logic_error {
  using std::logic_error::logic_error;
};

enum class DeliveryStatus { applied, buffered };

/// A deterministic simulated system of replicas under causal delivery.
///
/// Generation runs at one replica and applies the chain there at once.
/// Other replicas apply the chain later, one message at a time, whenever
/// the harness delivers it. Single-threaded; copyable as a value.
class World {
 public:
  explicit World(WorldConfig config);

  const WorldConfig& config() const { return config_; }
  std::uint32_t replica_count() const { return config_.replicas; }
  const Replica& replica(ReplicaId r) const { return *replicas_.at(r.value); }
  const std::vector<Event>& events(ReplicaId origin) const { return log_->events.at(origin.value); }
  const Event& event(EventId id) const;
  bool has_event(EventId id) const;
  std::uint32_t message_count(const Event& e) const;

  /// Runs an operation at `replica`. Updates produce an event; queries
  /// answer locally. Returns the failing precondition, if any.
  Outcome generate(ReplicaId replica, const Operation& op);

  bool applied(ReplicaId replica, MessageRef msg) const;
  bool deliverable(ReplicaId replica, MessageRef msg) const;
  /// Throws DuplicateDelivery if already applied. Buffered messages are
  /// re-examined after every application.
  DeliveryStatus deliver(ReplicaId replica, MessageRef msg);
  /// Next message of `origin`'s stream not yet applied at `replica`.
  std::optional<MessageRef> next_message(ReplicaId replica, ReplicaId origin) const;

  std::vector<std::uint64_t> pending_gossip(ReplicaId replica) const;
  bool gossip_deliverable(ReplicaId replica, std::uint64_t id) const;
  /// Returns false if no such pending message or not yet deliverable.
  bool deliver_gossip(ReplicaId replica, std::uint64_t id);

  /// Delivers every outstanding message everywhere, data and gossip, in a
  /// fixed causal order. Throws Stuck if something is never deliverable.
  void quiesce();
  bool quiescent() const;
  /// Applies whatever `replica` needs to reach `target`.
  void catch_up(ReplicaId replica, const CausalCut& target);
  /// Every replica announces once, then all gossip is delivered.
  void announce_round();

  /// Called after each executed step, including those run inside
  /// quiesce/catch_up.
  void set_observer(std::function<void(const Step&)> observer) { observer_ = std::move(observer); }

  /// Canonical text dump of all replicated object state. Replica-local
  /// bookkeeping (stability queries, buffers) is included when `full`.
  std::string serialize_state(bool full = false) const;

  /// Compact binary encoding of the complete state, for memoizing state
  /// exploration. Equal keys mean equal states and equal futures; gossip
  /// ids are left out since only their per-sender order matters.
  std::string state_key() const;
  /// As state_key, restricted to the object stores.
  std::string objects_key() const;

 private:
  // Replicas and the event log are shared between copies of a world until
  // one of them writes, which keeps state exploration cheap.
  struct EventLog {
    std::vector<std::vector<Event>> events;  // per origin
    std::vector<std::string> keys;           // per origin, state_key bytes of its events
  };
  static void encode_event(std::string& out, const Event& e);

  Replica& mutable_replica(ReplicaId r);
  EventLog& mutable_log();
  void apply_message(Replica& r, MessageRef msg);
  void drain_buffer(Replica& r);
  void broadcast(ReplicaId from, const std::variant<QueryRegistration, ClockAnnouncement>& body);
  void receive_gossip(Replica& r, const GossipMessage& m);
  void notify(const Step& s);

  WorldConfig config_;
  std::vector<std::shared_ptr<Replica>> replicas_;
  std::shared_ptr<EventLog> log_;
  // Lazily built key pieces per replica (objects, then the rest); dropped
  // whenever the replica is written.
  struct ReplicaKey {
    std::string objects;
    std::string rest;
  };
  const ReplicaKey& replica_key(std::uint32_t r) const;
  mutable std::vector<std::shared_ptr<const ReplicaKey>> keys_;
  std::vector<GossipMessage> gossip_;  // pending, ordered by id
  std::uint64_t next_gossip_ = 1;
  std::function<void(const Step&)> observer_;
};

}  // namespace refcrdt
