#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refcrdt/invariants.hpp"
#include "refcrdt/operation.hpp"
#include "refcrdt/world.hpp"

namespace refcrdt {

struct ProgramEvent {
  ReplicaId replica;
  Operation op;
};

/// A small concurrent program. Setup runs first and is quiesced; the
/// events are then explored under every delivery order.
struct Program {
  std::string name;
  std::uint32_t replicas = 2;
  std::vector<ProgramEvent> setup;
  std::vector<ProgramEvent> events;  // each replica runs its own in order
  /// When false every event is generated before anything is delivered, so
  /// all events are mutually concurrent. When true generation interleaves
  /// with delivery.
  bool interleave_generation = true;
  /// Announcements each replica may additionally make at any point once it
  /// knows of a stability query.
  std::uint32_t announce_budget = 0;
};

struct BoundExceeded : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Inspects a quiescent state in which every program event has run.
/// `outcomes` holds outcome_string of each program event, by index.
using TerminalCheck =
    std::function<std::optional<std::string>(const World&, const std::vector<std::string>& outcomes)>;

/// Inspects every reachable state; a returned message counts as a failure.
using StateCheck = std::function<std::optional<std::string>(const World&)>;

struct ExploreOptions {
  std::size_t bound = 5;
  CompositionMode mode = CompositionMode::pure_causal;
  /// Also explore in atomic mode and require each of its object states to
  /// be reachable in pure-causal mode.
  bool check_atomic_refinement = true;
  TerminalCheck terminal_check;
  StateCheck state_check;
};

struct ExploreReport {
  InvariantReport invariants;
  std::size_t states = 0;
  std::size_t terminals = 0;  // quiescent with every event run
  std::size_t atomic_states = 0;
  std::size_t atomic_unreachable = 0;  // atomic object states missing in pure-causal
  std::size_t terminal_failures = 0;
  std::optional<std::string> first_terminal_failure;
  std::size_t state_failures = 0;
  std::optional<std::string> first_state_failure;
  std::optional<std::string> first_atomic_unreachable;

  bool ok() const {
    return invariants.ok() && atomic_unreachable == 0 && terminal_failures == 0 && state_failures == 0;
  }
  void merge(const ExploreReport& other);
};

/// Enumerates every reachable state of `program`: generation steps in
/// per-replica program order, causal deliveries and gossip deliveries.
/// Checks I1, I3, I4 and stably_subset ⇒ oracle_stable in every state,
/// that oracle_stable stays true once true, and I2, I3, I5, I6 in every
/// quiescent state. Throws BoundExceeded.
ExploreReport exhaustive_explore(const Program& program, const ExploreOptions& options = {});

/// Fixed two-replica setup: roots A[a] and B[b], X[x] referenced from A.a.
std::vector<ProgramEvent> catalog_setup();
/// Operation templates, each usable at either replica.
std::vector<Operation> catalog_operations();
/// Every program of 1..max_events catalog events, up to per-replica order.
std::vector<Program> catalog_programs(std::size_t max_events);

/// Explores each catalog program; returns the merged report and the number
/// of programs explored.
ExploreReport explore_catalog(std::size_t max_events, const ExploreOptions& options,
                              std::size_t* programs = nullptr);

}  // namespace refcrdt
