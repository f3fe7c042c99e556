#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "refcrdt/invariants.hpp"
#include "refcrdt/trace.hpp"

namespace refcrdt {

/// All harness randomness: std::mt19937_64 seeded with the 64-bit trace
/// seed, with bounded draws done by rejection sampling so that results do
/// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool chance(std::uint32_t permille) { return below(1000) < permille; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer over (master, index): per-execution seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Builds a random execution. Each event runs at a random replica after
/// that replica has caught up with two randomly chosen earlier events: their
/// causal past in full and a random prefix of their own effector chains.
/// Throws ConfigInvalid.
Trace random_execution(std::uint64_t seed, const TraceConfig& config);

struct Execution {
  Trace trace;
  InvariantReport report;
};

/// random_execution with the invariant monitor attached while generating;
/// the report equals check_invariants(trace).
Execution random_execution_checked(std::uint64_t seed, const TraceConfig& config);

/// Replays `trace` checking I1–I4 and refinement at every step, then I5–I7
/// after forced quiescence, followed by a collection phase.
/// Throws ReplayMismatch.
InvariantReport check_invariants(const Trace& trace);

/// Replays, quiesces and compares all replica object states.
bool convergence_check(const Trace& trace);

struct NotFailing : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using FailurePredicate = std::function<bool(const Trace&)>;

/// Greedy shrinking: drop generate steps, then delivery steps, keeping any
/// candidate that still fails. The result is never longer than the input.
Trace shrink(const Trace& failing, const FailurePredicate& still_fails);

/// Shrinks while preserving the first violated invariant. Throws NotFailing.
Trace shrink(const Trace& failing);

struct CampaignOptions {
  std::uint64_t seed = 1;
  std::uint64_t executions = 1000;
  TraceConfig config;
  unsigned threads = 0;  // 0: hardware concurrency
  bool shrink_failures = true;
  std::size_t keep_failures = 5;
};

struct CampaignFailure {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  Violation first;
  Trace trace;  // shrunk when requested
};

struct CampaignSummary {
  std::uint64_t executions = 0;
  std::array<std::uint64_t, kInvariantCount> violating_executions{};
  std::uint64_t failing_executions = 0;
  std::uint64_t multivalued_executions = 0;
  std::uint64_t deletes = 0;
  std::uint64_t stable_queries = 0;
  std::vector<CampaignFailure> failures;  // sorted by index, at most keep_failures

  std::uint64_t violations(Invariant i) const {
    return violating_executions[static_cast<std::size_t>(i)];
  }
};

CampaignSummary run_campaign(const CampaignOptions& options);

}  // namespace refcrdt
