#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace refcrdt {

/// Index of a replica in the fixed replica set of a world.
struct ReplicaId {
  std::uint32_t value = 0;

  auto operator<=>(const ReplicaId&) const = default;
};

/// Identifies one generated event: the origin replica and its 1-based
/// sequence number at that replica. Also used as the write dot of outref
/// assignments.
struct EventId {
  ReplicaId replica;
  std::uint32_t seq = 0;

  auto operator<=>(const EventId&) const = default;
};

/// Unmanaged address of one logical object. Never reused.
struct ObjectKey {
  ReplicaId origin;
  std::uint32_t counter = 0;

  auto operator<=>(const ObjectKey&) const = default;
};

/// Globally unique identifier of one reference instance. Minted by exactly
/// one generator; the counter is the minting event's sequence number.
struct RefId {
  ReplicaId origin;
  std::uint32_t counter = 0;

  auto operator<=>(const RefId&) const = default;
};

inline RefId ref_minted_by(EventId e) { return RefId{e.replica, e.seq}; }
inline ObjectKey key_minted_by(EventId e) { return ObjectKey{e.replica, e.seq}; }

std::string to_string(ReplicaId r);
std::string to_string(EventId e);
std::string to_string(ObjectKey k);
std::string to_string(RefId r);

}  // namespace refcrdt
