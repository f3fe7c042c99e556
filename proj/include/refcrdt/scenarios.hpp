#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refcrdt/explorer.hpp"
#include "refcrdt/invariants.hpp"
#include "refcrdt/world.hpp"

namespace refcrdt {

/// Objects of the concurrent-assignment example: roots A[a], B[b], C[c],
/// with X referenced from A.a and Y from C.c. Built at replica 0.
namespace fig2 {
inline constexpr ObjectKey A{ReplicaId{0}, 1};
inline constexpr ObjectKey B{ReplicaId{0}, 2};
inline constexpr ObjectKey C{ReplicaId{0}, 3};
inline constexpr ObjectKey X{ReplicaId{0}, 4};
inline constexpr ObjectKey Y{ReplicaId{0}, 5};
}  // namespace fig2

/// Objects of the delete/assign race: roots A[a], B[b], X[x] referenced
/// from A.a. Built at replica 0; the same as the explorer catalog setup.
namespace fig1 {
inline constexpr ObjectKey A{ReplicaId{0}, 1};
inline constexpr ObjectKey B{ReplicaId{0}, 2};
inline constexpr ObjectKey X{ReplicaId{0}, 3};
}  // namespace fig1

/// Three replicas concurrently run B.b := A.a, B.b := A.a and B.b := C.c;
/// all three are generated before any delivery.
Program figure2_program();

/// Replica 0 clears A.a, asks may_delete(X) and tries delete(X) while
/// replica 1 copies A.a into B.b. Generation interleaves with delivery and
/// both replicas may announce twice.
Program figure1_program();

/// nullopt when every replica shows: B.b = two entries to X and one to Y,
/// |inref(X)| = 3 with sources A, B, B, |inref(Y)| = 2 with sources C, B,
/// A.a and C.c single-valued.
std::optional<std::string> figure2_shape(const World& w);

/// Fails a terminal state of figure1_program in which both the assignment
/// and the delete succeeded.
TerminalCheck figure1_terminal_check();
TerminalCheck figure2_terminal_check();

struct ScenarioResult {
  bool passed = true;
  std::vector<std::string> lines;  // one per check, prefixed "ok" or "FAILED"
  World world;
  InvariantReport report;

  void expect(bool condition, const std::string& what);
};

/// Runs the concurrent-assignment program in one fixed schedule, then checks the state
/// shape, that invoking B.b is refused while it is multi-valued, and the
/// invariants.
ScenarioResult run_figure2(CompositionMode mode);

/// Runs the race: A.a := NULL at replica 0 concurrently with B.b := A.a at
/// replica 1, then may_delete(X), announcement rounds and delete(X) at
/// replica 0. The delete must be refused and no replica may ever hold a
/// dangling entry. With Fault::skip_stability the delete relies on the
/// local listing alone and the dangling reference is expected instead.
ScenarioResult run_figure1(CompositionMode mode, Fault fault = Fault::none);

}  // namespace refcrdt
