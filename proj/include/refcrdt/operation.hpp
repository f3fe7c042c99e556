#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refcrdt/ids.hpp"
#include "refcrdt/refs.hpp"

namespace refcrdt {

namespace op {

/// Creates an object. With an anchor the new object is referenced from the
/// anchor slot in the same chain, otherwise it is born unreachable (unless
/// it is a root).
struct CreateObject {
  bool root = false;
  std::vector<std::string> attrs;
  std::string label;
  std::optional<ObjectKey> key;  // minted from the event id when absent
  std::optional<Slot> anchor;

  bool operator==(const CreateObject&) const = default;
};

struct Init {
  Slot source;
  ObjectKey target;
  bool operator==(const Init&) const = default;
};

struct Assign {
  Slot dst;
  Slot src;
  bool operator==(const Assign&) const = default;
};

struct AssignNull {
  Slot slot;
  bool operator==(const AssignNull&) const = default;
};

struct Invoke {
  Slot slot;
  bool operator==(const Invoke&) const = default;
};

/// `last` absent means the target's own self references.
struct MayDelete {
  ObjectKey target;
  std::optional<LastRefs> last;
  bool operator==(const MayDelete&) const = default;
};

struct Delete {
  ObjectKey target;
  std::optional<LastRefs> last;
  bool operator==(const Delete&) const = default;
};

struct Announce {
  bool operator==(const Announce&) const = default;
};

}  // namespace op

using Operation = std::variant<op::CreateObject, op::Init, op::Assign, op::AssignNull,
                               op::Invoke, op::MayDelete, op::Delete, op::Announce>;

/// Operations that produce an effector chain when their preconditions hold.
bool is_update(const Operation& op);

std::string_view op_name(const Operation& op);
std::string describe(const Operation& op);

/// Why a generator refused an operation.
enum class Failure {
  KeyInUse,
  UnknownObject,
  UnknownAttribute,
  DeletedObject,
  UnreachableTarget,
  MultiValued,
  NullSource,
  NullReference,
  NotUnreachable,
  RootObject,
  AlreadyDeleted,
  InvalidLastRefs,
};

std::string_view to_string(Failure f);
std::optional<Failure> failure_from_string(std::string_view s);

/// Result of running an operation at a replica.
///   EventId       an update was generated
///   bool          may_delete answer
///   ObjectKey     invoke target
///   std::monostate announce
///   Failure       a precondition was false; nothing happened
using Outcome = std::variant<EventId, bool, ObjectKey, std::monostate, Failure>;

std::string outcome_string(const Outcome& o);

}  // namespace refcrdt
