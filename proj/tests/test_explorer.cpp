#include <doctest.h>

#include "refcrdt/explorer.hpp"
#include "refcrdt/scenarios.hpp"
#include "support.hpp"

using namespace refcrdt;
using namespace refcrdt::testing;

namespace {

const ObjectKey kA{ReplicaId{0}, 1};
const ObjectKey kB{ReplicaId{0}, 2};
const ObjectKey kX{ReplicaId{0}, 3};

Program with_events(std::vector<ProgramEvent> events, std::uint32_t budget = 0) {
  Program p;
  p.name = "test";
  p.setup = catalog_setup();
  p.events = std::move(events);
  p.announce_budget = budget;
  return p;
}

}  // namespace

TEST_SUITE("explorer") {
  TEST_CASE("single event program") {
    Program p;
    p.name = "one";
    p.events = {{R(0), op::CreateObject{true, {"a"}, "", {}, {}}}};
    const ExploreReport r = exhaustive_explore(p);
    CHECK(r.ok());
    // generate, then deliver to r1
    CHECK(r.states == 3);
    CHECK(r.terminals == 1);
    CHECK(r.atomic_unreachable == 0);
  }

  TEST_CASE("programs beyond the bound are refused") {
    std::vector<ProgramEvent> events(6, ProgramEvent{R(0), op::AssignNull{Slot{kA, "a"}}});
    CHECK_THROWS_AS(exhaustive_explore(with_events(events)), BoundExceeded);
    ExploreOptions o;
    o.bound = 6;
    CHECK_NOTHROW(exhaustive_explore(with_events(events), o));
  }

  TEST_CASE("B.b entries stay listed while overwrites race") {
    Program p = with_events({
        {R(0), op::Init{Slot{kB, "b"}, kX}},
        {R(0), op::AssignNull{Slot{kB, "b"}}},
        {R(1), op::Assign{Slot{kB, "b"}, Slot{kA, "a"}}},
    });
    ExploreOptions o;
    o.state_check = [](const World& w) -> std::optional<std::string> {
      for (std::uint32_t r = 0; r < w.replica_count(); ++r) {
        const ObjectStore& s = w.replica(R(r)).objects;
        for (const auto& e : s.at(kB).attrs.at("b").entries) {
          if (e.target && !s.at(kX).inref.current().contains(InRefPair{kB, *e.ref})) {
            return "B.b entry not listed";
          }
        }
      }
      return std::nullopt;
    };
    const ExploreReport r = exhaustive_explore(p, o);
    CHECK(r.ok());
    CHECK(r.terminals > 1);
  }

  TEST_CASE("assign_null concurrent with assign, every order") {
    Program p = with_events({
        {R(0), op::AssignNull{Slot{kB, "b"}}},
        {R(1), op::Assign{Slot{kB, "b"}, Slot{kA, "a"}}},
    });
    p.interleave_generation = false;
    ExploreOptions o;
    o.terminal_check = [](const World& w, const std::vector<std::string>&) -> std::optional<std::string> {
      for (std::uint32_t r = 0; r < w.replica_count(); ++r) {
        if (targets(w, R(r), Slot{kB, "b"}).size() != 1 || null_entries(w, R(r), Slot{kB, "b"}) != 1) {
          return "B.b should hold NULL and X";
        }
      }
      return std::nullopt;
    };
    const ExploreReport r = exhaustive_explore(p, o);
    CHECK(r.ok());
    CHECK(r.terminals == 1);
    CHECK(r.invariants.saw_multivalued);
  }

  TEST_CASE("self cycle becomes deletable in some explored state") {
    Program p = with_events({
        {R(0), op::Init{Slot{kX, "x"}, kX}},
        {R(0), op::AssignNull{Slot{kA, "a"}}},
        {R(0), op::MayDelete{kX, std::nullopt}},
        {R(0), op::Delete{kX, std::nullopt}},
    }, 2);
    std::size_t stable_states = 0;
    ExploreOptions o;
    o.state_check = [&](const World& w) -> std::optional<std::string> {
      for (const auto& [q, s] : w.replica(R(0)).stability.own) {
        stable_states += s.phase == QueryPhase::stable && !q.last.refs.empty();
      }
      return std::nullopt;
    };
    std::size_t deleted = 0;
    o.terminal_check = [&](const World& w, const std::vector<std::string>& out) -> std::optional<std::string> {
      if (out[3].rfind("ok", 0) == 0) {
        ++deleted;
        if (!w.replica(R(1)).objects.at(kX).deleted) return "delete not applied";
      }
      return std::nullopt;
    };
    const ExploreReport r = exhaustive_explore(p, o);
    CHECK(r.ok());
    CHECK(stable_states > 0);
    CHECK(deleted > 0);
  }

  TEST_CASE("fig1 and fig2 programs") {
    ExploreOptions o1;
    o1.terminal_check = figure1_terminal_check();
    const ExploreReport f1 = exhaustive_explore(figure1_program(), o1);
    CHECK(f1.ok());
    CHECK(f1.terminals > 0);
    ExploreOptions o2;
    o2.terminal_check = figure2_terminal_check();
    const ExploreReport f2 = exhaustive_explore(figure2_program(), o2);
    CHECK(f2.ok());
    CHECK(f2.atomic_states > 0);
  }

  TEST_CASE("catalog of up to two events") {
    std::size_t programs = 0;
    const ExploreReport r = explore_catalog(2, ExploreOptions{}, &programs);
    CHECK(programs == catalog_programs(2).size());
    CHECK(programs == 4 * 2 + 16 * 3);
    CHECK(r.ok());
  }
}
