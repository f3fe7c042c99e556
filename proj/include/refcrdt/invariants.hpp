#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refcrdt/ids.hpp"
#include "refcrdt/step.hpp"
#include "refcrdt/world.hpp"

namespace refcrdt {

enum class Invariant : std::size_t {
  referential_integrity,  // I1
  unique_ids,             // I2
  safe_deletion,          // I3
  listing_well_formed,    // I4
  convergence,            // I5
  exact_listing,          // I6
  liveness,               // I7
  stability_refinement,   // stably_subset ⇒ oracle_stable
};

inline constexpr std::size_t kInvariantCount = 8;

std::string_view to_string(Invariant i);
/// Short tag, "I1".."I7" or "R".
std::string_view tag(Invariant i);

struct Violation {
  Invariant which;
  std::size_t step = 0;
  std::optional<ReplicaId> replica;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct InvariantReport {
  std::vector<Violation> violations;  // first violation of each invariant
  std::array<std::size_t, kInvariantCount> counts{};

  // Coverage statistics.
  bool saw_multivalued = false;
  std::size_t trace_steps = 0;
  std::size_t deletes = 0;
  std::size_t stable_queries = 0;

  bool ok() const { return violations.empty(); }
  bool passed(Invariant i) const { return counts[static_cast<std::size_t>(i)] == 0; }
  const Violation* first(Invariant i) const;
  void record(Violation v);

  bool operator==(const InvariantReport&) const = default;
};

// Checks usable on any world state. Each returns the first problem found.
std::optional<Violation> check_referential_integrity(const World& w, ReplicaId r);
std::optional<Violation> check_listing_well_formed(const World& w, ReplicaId r);
/// I3 at one replica: objects deleted by an event whose dependencies this
/// replica has seen hold only ignored pairs.
std::optional<Violation> check_deleted_listings(const World& w, ReplicaId r);
/// I3 over the whole event log: every non-ignored listing addition to a
/// deleted object is causally before the delete.
std::optional<Violation> check_no_late_additions(const World& w);
std::optional<Violation> check_unique_ids(const World& w);
std::optional<Violation> check_refinement(const World& w);
/// Requires a quiescent world.
std::optional<Violation> check_convergence(const World& w);
/// Requires a quiescent world.
std::optional<Violation> check_exact_listing(const World& w);

/// Drives the checks over a running world: state invariants after every
/// step, then quiescence, liveness and a collection phase at the end.
class InvariantMonitor {
 public:
  explicit InvariantMonitor(InvariantReport& report) : report_(report) {}

  /// Installs an observer on `w`; `w` must outlive the monitor's use.
  void attach(World& w);
  void after_step(const World& w, const Step& s);

  /// Quiesces `w`, checks I2, I3, I5, I6, I7, then repeatedly collects
  /// every deletable object and re-checks.
  void finish(World& w);

  std::size_t steps() const { return step_; }

 private:
  void run_liveness(World& w);
  void run_collection(World& w);
  void check_quiescent(World& w);

  InvariantReport& report_;
  std::size_t step_ = 0;
};

}  // namespace refcrdt
