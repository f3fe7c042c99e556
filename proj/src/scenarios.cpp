#include "refcrdt/scenarios.hpp"

#include <algorithm>

namespace refcrdt {

namespace {

const ReplicaId r0{0}, r1{1}, r2{2};

op::CreateObject root(std::string label, std::string attr) {
  return op::CreateObject{true, {std::move(attr)}, std::move(label), std::nullopt, std::nullopt};
}

op::CreateObject anchored(std::string label, std::vector<std::string> attrs, Slot anchor) {
  return op::CreateObject{false, std::move(attrs), std::move(label), std::nullopt, anchor};
}

std::vector<ProgramEvent> figure2_setup() {
  using namespace fig2;
  return {
      {r0, root("A", "a")},
      {r0, root("B", "b")},
      {r0, root("C", "c")},
      {r0, anchored("X", {}, Slot{A, "a"})},
      {r0, anchored("Y", {}, Slot{C, "c"})},
  };
}

std::vector<ProgramEvent> figure1_setup() {
  using namespace fig1;
  return {
      {r0, root("A", "a")},
      {r0, root("B", "b")},
      {r0, anchored("X", {"x"}, Slot{A, "a"})},
  };
}

void run_setup(World& w, const std::vector<ProgramEvent>& setup) {
  for (const ProgramEvent& e : setup) {
    const Outcome o = w.generate(e.replica, e.op);
    if (std::holds_alternative<Failure>(o)) {
      throw std::logic_error("scenario setup failed: " + describe(e.op) + " -> " + outcome_string(o));
    }
  }
  w.quiesce();
}

bool ok(const std::string& outcome) { return outcome.starts_with("ok"); }

std::size_t count_sources(const std::set<InRefPair>& pairs, ObjectKey source) {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [&](const InRefPair& p) { return p.source == source; }));
}

}  // namespace

Program figure2_program() {
  using namespace fig2;
  Program p;
  p.name = "figure2";
  p.replicas = 3;
  p.setup = figure2_setup();
  p.events = {
      {r0, op::Assign{Slot{B, "b"}, Slot{A, "a"}}},
      {r1, op::Assign{Slot{B, "b"}, Slot{A, "a"}}},
      {r2, op::Assign{Slot{B, "b"}, Slot{C, "c"}}},
  };
  p.interleave_generation = false;
  return p;
}

Program figure1_program() {
  using namespace fig1;
  Program p;
  p.name = "figure1";
  p.replicas = 2;
  p.setup = figure1_setup();
  p.events = {
      {r0, op::AssignNull{Slot{A, "a"}}},
      {r1, op::Assign{Slot{B, "b"}, Slot{A, "a"}}},
      {r0, op::MayDelete{X, std::nullopt}},
      {r0, op::Delete{X, std::nullopt}},
  };
  p.interleave_generation = true;
  p.announce_budget = 2;
  return p;
}

std::optional<std::string> figure2_shape(const World& w) {
  using namespace fig2;
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    const ObjectStore& s = w.replica(ReplicaId{i}).objects;
    const std::string at = " at " + to_string(ReplicaId{i});
    if (!s.contains(A) || !s.contains(B) || !s.contains(C) || !s.contains(X) || !s.contains(Y)) {
      return "missing objects" + at;
    }
    const auto& bb = s.at(B).attrs.at("b").entries;
    const auto to = [&](ObjectKey t) {
      return std::count_if(bb.begin(), bb.end(), [&](const OutRefEntry& e) { return e.target == t; });
    };
    if (bb.size() != 3 || to(X) != 2 || to(Y) != 1) {
      return "B.b has " + std::to_string(bb.size()) + " entries (" + std::to_string(to(X)) + " to X, " +
             std::to_string(to(Y)) + " to Y)" + at;
    }
    const auto x = s.at(X).inref.current();
    const auto y = s.at(Y).inref.current();
    if (x.size() != 3 || count_sources(x, A) != 1 || count_sources(x, B) != 2) {
      return "inref(X) has " + std::to_string(x.size()) + " pairs" + at;
    }
    if (y.size() != 2 || count_sources(y, C) != 1 || count_sources(y, B) != 1) {
      return "inref(Y) has " + std::to_string(y.size()) + " pairs" + at;
    }
    if (!s.at(A).attrs.at("a").single_valued() || !s.at(C).attrs.at("c").single_valued()) {
      return "A.a or C.c is multi-valued" + at;
    }
  }
  return std::nullopt;
}

TerminalCheck figure1_terminal_check() {
  return [](const World&, const std::vector<std::string>& outcomes) -> std::optional<std::string> {
    // Program order: null, assign, may_delete, delete.
    if (ok(outcomes.at(1)) && ok(outcomes.at(3))) {
      return "delete of X succeeded although B.b := A.a ran (" + outcomes.at(1) + ")";
    }
    return std::nullopt;
  };
}

TerminalCheck figure2_terminal_check() {
  return [](const World& w, const std::vector<std::string>&) { return figure2_shape(w); };
}

void ScenarioResult::expect(bool condition, const std::string& what) {
  lines.push_back((condition ? "ok      " : "FAILED  ") + what);
  passed = passed && condition;
}

ScenarioResult run_figure2(CompositionMode mode) {
  using namespace fig2;
  ScenarioResult r{true, {}, World(WorldConfig{3, mode, Fault::none}), {}};
  InvariantMonitor monitor(r.report);
  monitor.attach(r.world);
  run_setup(r.world, figure2_setup());
  for (const ProgramEvent& e : figure2_program().events) {
    const Outcome o = r.world.generate(e.replica, e.op);
    r.expect(std::holds_alternative<EventId>(o),
             describe(e.op) + " at " + to_string(e.replica) + ": " + outcome_string(o));
  }
  r.world.quiesce();
  const auto shape = figure2_shape(r.world);
  r.expect(!shape, shape ? *shape : "every replica: B.b = {X, X, Y}, |inref(X)| = 3, |inref(Y)| = 2");
  const Outcome invoke = r.world.generate(r0, op::Invoke{Slot{B, "b"}});
  r.expect(invoke == Outcome{Failure::MultiValued}, "invoke B.b refused: " + outcome_string(invoke));
  monitor.finish(r.world);
  r.expect(r.report.ok(), r.report.ok() ? "invariants hold"
                                        : "invariant " + std::string(tag(r.report.violations.front().which)) +
                                              ": " + r.report.violations.front().detail);
  return r;
}

ScenarioResult run_figure1(CompositionMode mode, Fault fault) {
  using namespace fig1;
  ScenarioResult r{true, {}, World(WorldConfig{2, mode, fault}), {}};
  InvariantMonitor monitor(r.report);
  monitor.attach(r.world);
  World& w = r.world;
  run_setup(w, figure1_setup());

  // The race: both generated before either is delivered.
  const Outcome cleared = w.generate(r0, op::AssignNull{Slot{A, "a"}});
  const Outcome copied = w.generate(r1, op::Assign{Slot{B, "b"}, Slot{A, "a"}});
  r.expect(std::holds_alternative<EventId>(cleared), "A.a := NULL at r0: " + outcome_string(cleared));
  r.expect(std::holds_alternative<EventId>(copied), "B.b := A.a at r1: " + outcome_string(copied));

  const Outcome asked = w.generate(r0, op::MayDelete{X, std::nullopt});
  Outcome removed;
  if (fault == Fault::skip_stability) {
    // X looks unreferenced at r0 before the copy arrives.
    removed = w.generate(r0, op::Delete{X, std::nullopt});
    w.quiesce();
  } else {
    r.expect(asked == Outcome{false}, "may_delete(X) at r0: " + outcome_string(asked));
    for (int round = 0; round < 3; ++round) w.announce_round();
    const Outcome again = w.generate(r0, op::MayDelete{X, std::nullopt});
    r.expect(again == Outcome{false}, "may_delete(X) after announcements: " + outcome_string(again));
    removed = w.generate(r0, op::Delete{X, std::nullopt});
  }

  monitor.finish(w);
  const bool dangling = !r.report.passed(Invariant::referential_integrity);
  if (fault == Fault::skip_stability) {
    r.expect(std::holds_alternative<EventId>(removed), "local-only delete(X) at r0: " + outcome_string(removed));
    r.expect(dangling, dangling ? "dangling reference reproduced: " +
                                      r.report.first(Invariant::referential_integrity)->detail
                                : "no dangling reference appeared");
    return r;
  }
  r.expect(removed == Outcome{Failure::NotUnreachable}, "delete(X) at r0: " + outcome_string(removed));
  r.expect(w.replica(r0).objects.at(X).inref.current().size() == 1 &&
               w.replica(r1).objects.at(X).inref.current().size() == 1,
           "X stays listed from B on both replicas");
  r.expect(!dangling, dangling ? "dangling: " + r.report.first(Invariant::referential_integrity)->detail
                               : "no replica ever held a dangling entry");
  r.expect(r.report.ok(), r.report.ok() ? "invariants hold"
                                        : "invariant " + std::string(tag(r.report.violations.front().which)) +
                                              ": " + r.report.violations.front().detail);
  return r;
}

}  // namespace refcrdt
