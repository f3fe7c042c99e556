#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "refcrdt/clock.hpp"
#include "refcrdt/ids.hpp"
#include "refcrdt/operation.hpp"

namespace refcrdt {

/// An operation run at one replica. Failed preconditions are kept: they are
/// legitimate trace content.
struct GenerateStep {
  ReplicaId replica;
  Operation op;
  std::string outcome;
  // Filled for successful updates.
  std::optional<EventId> event;
  std::optional<CausalCut> deps;
  std::vector<std::string> chain;

  bool operator==(const GenerateStep&) const = default;
};

/// Application of one effector message at one replica.
struct DeliverStep {
  ReplicaId replica;
  EventId event;
  std::uint32_t chain_index = 0;

  bool operator==(const DeliverStep&) const = default;
};

/// Receipt of one gossip message (announcement or query registration).
struct GossipStep {
  ReplicaId replica;
  std::uint64_t gossip = 0;

  bool operator==(const GossipStep&) const = default;
};

using Step = std::variant<GenerateStep, DeliverStep, GossipStep>;

}  // namespace refcrdt
