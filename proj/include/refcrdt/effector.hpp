#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "refcrdt/ids.hpp"
#include "refcrdt/refs.hpp"

namespace refcrdt {

namespace fx {

struct CreateObject {
  ObjectKey key;
  std::string label;
  bool root = false;
  std::vector<std::string> attrs;
  EventId dot;  // write dot of the initial NULL values
  bool operator==(const CreateObject&) const = default;
};

struct InrefAdd {
  ObjectKey target;
  InRefPair pair;
  bool operator==(const InrefAdd&) const = default;
};

struct InrefRemove {
  ObjectKey target;
  InRefPair pair;
  bool operator==(const InrefRemove&) const = default;
};

/// Self-contained MVR write: carries the writer's observed context so the
/// effector never reads anything but the register it updates.
struct OutrefSet {
  Slot slot;
  std::vector<OutRefEntry> entries;
  EventId dot;
  std::set<EventId> observed;
  bool operator==(const OutrefSet&) const = default;
};

struct MarkDeleted {
  ObjectKey object;
  LastRefs last;
  bool operator==(const MarkDeleted&) const = default;
};

}  // namespace fx

/// One downstream update. Every effector touches exactly one object.
using Effector =
    std::variant<fx::CreateObject, fx::InrefAdd, fx::InrefRemove, fx::OutrefSet, fx::MarkDeleted>;

ObjectKey effector_object(const Effector& e);

/// Deterministic and total over causally delivered effectors. Throws
/// std::logic_error when the addressed object is missing, which only a
/// causal-delivery bug can produce.
void apply_effector(ObjectStore& store, const Effector& e);

std::string summarize(const Effector& e);

}  // namespace refcrdt
