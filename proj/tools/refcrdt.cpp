// Command-line front end: campaigns, trace checking, exhaustive
// exploration, the fig1/fig2 scenarios and graph export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "refcrdt/dot.hpp"
#include "refcrdt/explorer.hpp"
#include "refcrdt/harness.hpp"
#include "refcrdt/scenarios.hpp"
#include "refcrdt/trace.hpp"

namespace fs = std::filesystem;
using namespace refcrdt;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CompositionMode parse_mode(const std::string& s) {
  auto m = mode_from_string(s);
  if (!m) throw UsageError("unknown mode '" + s + "' (atomic or pure-causal)");
  return *m;
}

Fault parse_fault(const std::string& s) {
  auto f = fault_from_string(s);
  if (!f) throw UsageError("unknown fault '" + s + "'");
  return *f;
}

void print_report(const InvariantReport& report, bool with_liveness = true) {
  for (std::size_t i = 0; i < kInvariantCount; ++i) {
    const auto which = static_cast<Invariant>(i);
    if (which == Invariant::liveness && !with_liveness) continue;
    std::cout << tag(which) << " " << to_string(which) << ": ";
    if (const Violation* v = report.first(which)) {
      std::cout << "FAIL (" << report.counts[i] << ") first at step " << v->step;
      if (v->replica) std::cout << " " << to_string(*v->replica);
      std::cout << ": " << v->detail << "\n";
    } else {
      std::cout << "pass\n";
    }
  }
}

struct RunArgs {
  std::uint64_t seed = 1;
  std::uint64_t executions = 1000;
  std::uint32_t events = 20;
  std::uint32_t replicas = 3;
  std::string mode = "pure-causal";
  std::string fault = "none";
  std::string out;
  unsigned threads = 0;
};

int cmd_run(const RunArgs& a) {
  if (a.executions == 0) throw UsageError("--executions must be at least 1");
  CampaignOptions o;
  o.seed = a.seed;
  o.executions = a.executions;
  o.threads = a.threads;
  o.config.events = a.events;
  o.config.replicas = a.replicas;
  o.config.mode = parse_mode(a.mode);
  o.config.fault = parse_fault(a.fault);
  try {
    validate(o.config);
  } catch (const ConfigInvalid& e) {
    throw UsageError(e.what());
  }
  o.shrink_failures = true;

  const CampaignSummary s = run_campaign(o);
  std::uint64_t total = 0;
  std::cout << "executions " << s.executions << " seed " << a.seed << " mode " << a.mode << " replicas "
            << a.replicas << " events " << a.events << "\n";
  for (std::size_t i = 0; i < kInvariantCount; ++i) {
    const auto which = static_cast<Invariant>(i);
    std::cout << tag(which) << " " << to_string(which) << ": " << s.violating_executions[i]
              << " violating executions\n";
    total += s.violating_executions[i];
  }
  std::cout << "multi-valued executions " << s.multivalued_executions << "\n";
  std::cout << "deletes " << s.deletes << " stable queries " << s.stable_queries << "\n";
  for (const CampaignFailure& f : s.failures) {
    std::cout << "failure execution " << f.index << " seed " << f.seed << " " << tag(f.first.which) << ": "
              << f.first.detail << " (shrunk to " << f.trace.steps.size() << " steps)";
    if (!a.out.empty()) {
      fs::create_directories(a.out);
      const fs::path path = fs::path(a.out) / ("failure-" + std::to_string(f.index) + ".trace");
      write_trace_file(path.string(), f.trace);
      std::cout << " -> " << path.string();
    }
    std::cout << "\n";
  }
  std::cout << "violations " << total << "\n";
  return total == 0 ? kOk : kViolation;
}

int cmd_check(const std::string& path) {
  Trace t;
  try {
    t = read_trace_file(path);
  } catch (const std::exception& e) {
    std::cerr << "cannot read trace: " << e.what() << "\n";
    return kUsage;
  }
  InvariantReport report;
  try {
    report = check_invariants(t);
  } catch (const ReplayMismatch& e) {
    std::cerr << "trace does not replay: " << e.what() << "\n";
    return kUsage;
  }
  std::cout << "trace seed " << t.seed << ", " << t.steps.size() << " steps\n";
  print_report(report);
  return report.ok() ? kOk : kViolation;
}

void print_explore(const ExploreReport& r) {
  std::cout << "states " << r.states << " (atomic " << r.atomic_states << "), quiescent " << r.terminals << "\n";
  // The explorer has no liveness check.
  print_report(r.invariants, false);
  std::cout << "atomic states unreachable in pure-causal mode: " << r.atomic_unreachable << "\n";
  if (r.first_atomic_unreachable) std::cout << "  " << *r.first_atomic_unreachable << "\n";
  std::cout << "terminal check failures: " << r.terminal_failures << "\n";
  if (r.first_terminal_failure) std::cout << "  " << *r.first_terminal_failure << "\n";
  if (r.state_failures) std::cout << "state check failures: " << r.state_failures << "\n";
  if (r.first_state_failure) std::cout << "  " << *r.first_state_failure << "\n";
}

int cmd_explore(std::size_t events, const std::string& program, const std::string& mode) {
  constexpr std::size_t kBound = 5;
  ExploreOptions o;
  o.bound = kBound;
  o.mode = parse_mode(mode);
  ExploreReport r;
  try {
    if (program == "catalog") {
      if (events > kBound) throw BoundExceeded("--events " + std::to_string(events) + " exceeds bound 5");
      std::size_t programs = 0;
      r = explore_catalog(events, o, &programs);
      std::cout << "catalog programs up to " << events << " events: " << programs << "\n";
    } else if (program == "fig1") {
      o.terminal_check = figure1_terminal_check();
      r = exhaustive_explore(figure1_program(), o);
    } else if (program == "fig2") {
      o.terminal_check = figure2_terminal_check();
      r = exhaustive_explore(figure2_program(), o);
    } else {
      throw UsageError("unknown program '" + program + "' (catalog, fig1, fig2)");
    }
  } catch (const BoundExceeded& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  print_explore(r);
  return r.ok() ? kOk : kViolation;
}

void write_dots(const World& w, const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    const std::string rname = name + "-" + to_string(ReplicaId{i});
    const fs::path path = fs::path(dir) / (rname + ".dot");
    std::ofstream(path) << graph_snapshot(w.replica(ReplicaId{i}).objects, rname);
    std::cout << "wrote " << path.string() << "\n";
  }
}

int cmd_scenario(const std::string& name, const std::string& dot, const std::string& mode) {
  const CompositionMode m = parse_mode(mode);
  ScenarioResult r = [&] {
    if (name == "fig1") return run_figure1(m);
    if (name == "fig2") return run_figure2(m);
    throw UsageError("unknown scenario '" + name + "' (fig1 or fig2)");
  }();
  for (const auto& line : r.lines) std::cout << line << "\n";
  if (!dot.empty()) write_dots(r.world, dot, name);
  std::cout << (r.passed ? "scenario passed" : "scenario FAILED") << "\n";
  return r.passed ? kOk : kViolation;
}

int cmd_export_dot(const std::string& path, std::size_t step, std::uint32_t replica, const std::string& out) {
  Trace t;
  try {
    t = read_trace_file(path);
  } catch (const std::exception& e) {
    std::cerr << "cannot read trace: " << e.what() << "\n";
    return kUsage;
  }
  if (step >= t.steps.size()) {
    std::cerr << "step " << step << " out of range (trace has " << t.steps.size() << " steps)\n";
    return kUsage;
  }
  if (replica >= t.config.replicas) {
    std::cerr << "replica " << replica << " out of range (trace has " << t.config.replicas << ")\n";
    return kUsage;
  }
  World w(t.config.world());
  try {
    replay_into(w, t, step + 1);
  } catch (const ReplayMismatch& e) {
    std::cerr << "trace does not replay: " << e.what() << "\n";
    return kUsage;
  }
  const std::string doc = graph_snapshot(w.replica(ReplicaId{replica}).objects,
                                         "step" + std::to_string(step) + "-r" + std::to_string(replica));
  if (out.empty()) {
    std::cout << doc;
  } else {
    std::ofstream(out) << doc;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replicated object store with referential integrity: simulator and checker"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a randomized campaign");
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--executions", run.executions, "Number of random executions");
  run_cmd->add_option("--events", run.events, "Events per execution");
  run_cmd->add_option("--replicas", run.replicas, "Replicas per execution");
  run_cmd->add_option("--mode", run.mode, "atomic or pure-causal");
  run_cmd->add_option("--fault", run.fault, "Inject a protocol fault: outref-before-inref, skip-stability");
  run_cmd->add_option("--out", run.out, "Directory for shrunk failing traces");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0: all cores)");

  std::string check_path;
  auto* check_cmd = app.add_subcommand("check", "Replay a trace file and check every invariant");
  check_cmd->add_option("trace", check_path, "Trace file")->required();

  std::size_t explore_events = 3;
  bool catalog = false;
  std::string explore_program = "catalog";
  std::string explore_mode = "pure-causal";
  auto* explore_cmd = app.add_subcommand("explore", "Exhaustively explore small programs");
  explore_cmd->add_option("--events", explore_events, "Maximum catalog program length (at most 5)");
  explore_cmd->add_flag("--catalog", catalog, "Explore every catalog program (default)");
  explore_cmd->add_option("--program", explore_program, "catalog, fig1 or fig2");
  explore_cmd->add_option("--mode", explore_mode, "atomic or pure-causal");

  std::string scenario_name, scenario_dot, scenario_mode = "pure-causal";
  auto* scenario_cmd = app.add_subcommand("scenario", "Run the fig1 or fig2 scenario");
  scenario_cmd->add_option("name", scenario_name, "fig1 or fig2")->required();
  scenario_cmd->add_option("--dot", scenario_dot, "Directory for per-replica graph files");
  scenario_cmd->add_option("--mode", scenario_mode, "atomic or pure-causal");

  std::string dot_path, dot_out;
  std::size_t dot_step = 0;
  std::uint32_t dot_replica = 0;
  auto* dot_cmd = app.add_subcommand("export-dot", "Render a replica's object graph after a trace step");
  dot_cmd->add_option("trace", dot_path, "Trace file")->required();
  dot_cmd->add_option("--step", dot_step, "Step index")->required();
  dot_cmd->add_option("--replica", dot_replica, "Replica index")->required();
  dot_cmd->add_option("--out", dot_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*check_cmd) return cmd_check(check_path);
    if (*explore_cmd) {
      if (catalog) explore_program = "catalog";
      return cmd_explore(explore_events, explore_program, explore_mode);
    }
    if (*scenario_cmd) return cmd_scenario(scenario_name, scenario_dot, scenario_mode);
    if (*dot_cmd) return cmd_export_dot(dot_path, dot_step, dot_replica, dot_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
