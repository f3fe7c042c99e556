#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refcrdt/step.hpp"
#include "refcrdt/world.hpp"

namespace refcrdt {

/// Relative weights of the operation kinds drawn by random executions.
struct OpWeights {
  std::uint32_t create = 3;
  std::uint32_t init = 2;
  std::uint32_t assign = 5;
  std::uint32_t assign_null = 2;
  std::uint32_t invoke = 1;
  std::uint32_t may_delete = 2;
  std::uint32_t remove = 2;
  std::uint32_t announce = 3;

  std::uint32_t total() const {
    return create + init + assign + assign_null + invoke + may_delete + remove + announce;
  }
  bool operator==(const OpWeights&) const = default;
};

struct TraceConfig {
  std::uint32_t replicas = 3;
  std::uint32_t events = 20;
  CompositionMode mode = CompositionMode::pure_causal;
  OpWeights weights;
  /// Chance, per event, of a settle point: full delivery plus one
  /// announce round.
  std::uint32_t settle_permille = 100;
  Fault fault = Fault::none;

  WorldConfig world() const { return WorldConfig{replicas, mode, fault}; }
  bool operator==(const TraceConfig&) const = default;
};

struct Trace {
  std::uint64_t seed = 0;
  TraceConfig config;
  std::vector<Step> steps;

  std::size_t generate_count() const;
  bool operator==(const Trace&) const = default;
};

inline constexpr int kTraceFormatVersion = 1;

struct TraceFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReplayMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigInvalid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Line-delimited JSON: a header line, one line per generate step, then one
/// line per delivery step. Every step line carries its global step index.
std::string serialize(const Trace& t);
Trace parse_trace(std::string_view text);

Trace read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const Trace& t);

void validate(const TraceConfig& c);

/// Executes the first `limit` steps (all by default) of `t` on `w`,
/// verifying every recorded outcome. Throws ReplayMismatch.
void replay_into(World& w, const Trace& t, std::size_t limit = static_cast<std::size_t>(-1));

World replay(const Trace& t);

/// Executes `t` skipping deliveries that are impossible and re-recording
/// outcomes, yielding a valid trace. Used after editing a trace.
Trace normalize(const Trace& t);

}  // namespace refcrdt
