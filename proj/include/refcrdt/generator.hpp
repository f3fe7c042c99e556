#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "refcrdt/effector.hpp"
#include "refcrdt/operation.hpp"
#include "refcrdt/refs.hpp"

namespace refcrdt {

/// Fault injection for harness self-tests. Each fault breaks one ordering or
/// precondition rule so the invariant checkers have something to catch.
enum class Fault {
  none,
  outref_before_inref,  // init/assign write the outref before listing it
  skip_stability,       // delete ignores the stability precondition
};

/// Answers whether deletion of `target` ignoring `last` is known to be
/// stably safe at the generating replica.
using StablyCheck = std::function<bool(ObjectKey target, const LastRefs& last)>;

using Chain = std::vector<Effector>;

/// Generator half of an update operation. Reads only the origin replica's
/// local state, evaluates the preconditions and returns the effector chain
/// in delivery order, or the failed precondition. No state is modified.
///
/// Chain layouts:
///   create          [create, (inref-add, outref-set, inref-remove*) if anchored]
///   init / assign   [inref-add, outref-set, inref-remove*]
///   assign_null     [outref-set, inref-remove*]
///   delete          [(outref-set, inref-remove*) per attr, mark-deleted]
/// Removal suffixes are sorted by RefId.
std::variant<Chain, Failure> build_chain(const ObjectStore& local, EventId id,
                                         const Operation& op, const StablyCheck& stably,
                                         Fault fault = Fault::none);

/// Local read for invoke: the unique non-NULL target of a single-valued outref.
std::variant<ObjectKey, Failure> invoke_target(const ObjectStore& local, const Slot& slot);

/// Resolves an optional ignore-set to the object's self references.
LastRefs resolve_last(const ObjectStore& local, ObjectKey target,
                      const std::optional<LastRefs>& last);

}  // namespace refcrdt
