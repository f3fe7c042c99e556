#include <doctest.h>

#include "refcrdt/harness.hpp"
#include "refcrdt/invariants.hpp"
#include "refcrdt/stability.hpp"
#include "refcrdt/world.hpp"
#include "support.hpp"

using namespace refcrdt;
using namespace refcrdt::testing;

namespace {

bool stable_at(const World& w, ReplicaId r, ObjectKey t, LastRefs last = {}) {
  return stably_subset(w.replica(r).stability, QueryKey{t, std::move(last)});
}

CausalCut cut_of(std::uint32_t n, std::uint32_t events) {
  CausalCut c(n);
  c[ReplicaId{0}] = ChainPosition{events, 0};
  return c;
}

}  // namespace

TEST_SUITE("stability") {
  TEST_CASE("frontier glb is the pointwise minimum and never decreases") {
    StableFrontier f(2);
    VectorClock a(2), b(2);
    a.set(R(0), 3);
    a.set(R(1), 1);
    b.set(R(0), 1);
    b.set(R(1), 4);
    f.observe(R(0), a);
    CHECK(f.glb()[R(0)] == 0);
    f.observe(R(1), b);
    CHECK(f.glb()[R(0)] == 1);
    CHECK(f.glb()[R(1)] == 1);
    const VectorClock before = f.glb();
    f.observe(R(1), VectorClock(2));
    CHECK(before.leq(f.glb()));
  }

  TEST_CASE("query needs equal confirmation cuts") {
    StabilityQuery q;
    q.on_report(R(0), cut_of(2, 1), true, 2);
    CHECK(q.phase == QueryPhase::collecting);
    q.on_report(R(1), cut_of(2, 2), true, 2);
    CHECK(q.phase == QueryPhase::confirming);
    q.on_report(R(0), cut_of(2, 2), true, 2);
    q.on_report(R(1), cut_of(2, 3), true, 2);
    CHECK(q.phase == QueryPhase::confirming);
    q.on_report(R(0), cut_of(2, 3), true, 2);
    q.on_report(R(1), cut_of(2, 3), true, 2);
    CHECK(q.phase == QueryPhase::stable);
  }

  TEST_CASE("a false report refutes and collection restarts") {
    StabilityQuery q;
    q.on_report(R(0), cut_of(2, 1), true, 2);
    q.on_report(R(1), cut_of(2, 1), false, 2);
    CHECK(q.phase == QueryPhase::refuted);
    CHECK(q.collected.empty());
    q.on_report(R(0), cut_of(2, 2), true, 2);
    CHECK(q.phase == QueryPhase::collecting);
  }

  TEST_CASE("unreferenced object becomes stable after exactly two rounds") {
    World w(WorldConfig{3, CompositionMode::pure_causal, Fault::none});
    const ObjectKey A = create_root(w, R(0), {"a"});
    const ObjectKey X = create_at(w, R(0), Slot{A, "a"}, {});
    w.generate(R(1), op::Announce{});
    w.quiesce();
    w.generate(R(0), op::AssignNull{Slot{A, "a"}});
    w.quiesce();
    CHECK(std::get<bool>(w.generate(R(2), op::MayDelete{X, {}})) == false);
    w.quiesce();
    CHECK_FALSE(stable_at(w, R(2), X));
    w.announce_round();
    CHECK_FALSE(stable_at(w, R(2), X));
    w.announce_round();
    CHECK(stable_at(w, R(2), X));
    CHECK(oracle_stable(w, QueryKey{X, {}}));
    CHECK(std::get<bool>(w.generate(R(2), op::MayDelete{X, {}})) == true);
    CHECK(std::holds_alternative<EventId>(w.generate(R(2), op::Delete{X, {}})));
  }

  TEST_CASE("no announcements means never stable") {
    World w(WorldConfig{2, CompositionMode::pure_causal, Fault::none});
    const ObjectKey X = create_loose(w, R(0), {});
    w.generate(R(0), op::MayDelete{X, {}});
    for (int i = 0; i < 5; ++i) w.quiesce();
    CHECK_FALSE(stable_at(w, R(0), X));
    CHECK(oracle_stable(w, QueryKey{X, {}}));
  }

  TEST_CASE("single replica is stable after its own announcements") {
    World w(WorldConfig{1, CompositionMode::pure_causal, Fault::none});
    const ObjectKey X = create_loose(w, R(0), {});
    w.generate(R(0), op::MayDelete{X, {}});
    w.announce_round();
    w.announce_round();
    CHECK(stable_at(w, R(0), X));
  }

  TEST_CASE("glb dominates every clock after quiescence and two rounds") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      World w = replay(random_execution(seed, TraceConfig{}));
      w.quiesce();
      w.announce_round();
      w.announce_round();
      for (std::uint32_t r = 0; r < w.replica_count(); ++r) {
        const VectorClock glb = w.replica(R(r)).stability.frontier.glb();
        for (std::uint32_t s = 0; s < w.replica_count(); ++s) {
          CHECK(w.replica(R(s)).applied.complete().leq(glb));
        }
      }
    }
  }

  TEST_CASE("self cycle is deletable when its own reference is ignored") {
    World w(WorldConfig{2, CompositionMode::pure_causal, Fault::none});
    const ObjectKey A = create_root(w, R(0), {"a"});
    const ObjectKey X = create_at(w, R(0), Slot{A, "a"}, {"x"});
    const RefId self = ref_minted_by(ev(w.generate(R(0), op::Init{Slot{X, "x"}, X})));
    w.generate(R(0), op::AssignNull{Slot{A, "a"}});
    w.quiesce();
    CHECK(w.replica(R(1)).objects.at(X).inref.current() ==
          std::set<InRefPair>{InRefPair{X, self}});
    w.generate(R(0), op::MayDelete{X, LastRefs{{self}}});
    w.generate(R(0), op::MayDelete{X, LastRefs{}});
    w.quiesce();
    w.announce_round();
    w.announce_round();
    CHECK(stable_at(w, R(0), X, LastRefs{{self}}));
    CHECK_FALSE(stable_at(w, R(0), X, LastRefs{}));
    // An omitted ignore set means the object's own references.
    CHECK(std::get<bool>(w.generate(R(0), op::MayDelete{X, std::nullopt})) == true);
    CHECK(std::holds_alternative<EventId>(w.generate(R(0), op::Delete{X, std::nullopt})));
    w.quiesce();
    CHECK(w.replica(R(1)).objects.at(X).deleted);
  }

  TEST_CASE("an in-flight listing addition blocks stability") {
    World w(WorldConfig{2, CompositionMode::pure_causal, Fault::none});
    const ObjectKey A = create_root(w, R(0), {"a"});
    const ObjectKey B = create_root(w, R(0), {"b"});
    const ObjectKey X = create_at(w, R(0), Slot{A, "a"}, {});
    w.quiesce();
    w.generate(R(0), op::AssignNull{Slot{A, "a"}});
    w.generate(R(1), op::Assign{Slot{B, "b"}, Slot{A, "a"}});
    // r0 has not seen the assignment yet.
    CHECK(w.replica(R(0)).objects.at(X).inref.empty());
    CHECK_FALSE(oracle_stable(w, QueryKey{X, {}}));
    w.generate(R(0), op::MayDelete{X, {}});
    w.quiesce();
    w.announce_round();
    w.announce_round();
    CHECK_FALSE(stable_at(w, R(0), X));
    CHECK(std::get<Failure>(w.generate(R(0), op::Delete{X, {}})) == Failure::NotUnreachable);
    CHECK(targets(w, R(0), Slot{B, "b"}) == std::multiset<ObjectKey>{X});
  }

  TEST_CASE("deleting an object releases what it referenced") {
    World w(WorldConfig{2, CompositionMode::pure_causal, Fault::none});
    const ObjectKey A = create_root(w, R(0), {"a"});
    const ObjectKey X = create_at(w, R(0), Slot{A, "a"}, {"x"});
    const ObjectKey Y = create_at(w, R(0), Slot{X, "x"}, {});
    w.generate(R(0), op::AssignNull{Slot{A, "a"}});
    w.quiesce();
    w.generate(R(1), op::MayDelete{X, {}});
    w.generate(R(1), op::MayDelete{Y, {}});
    w.quiesce();
    w.announce_round();
    w.announce_round();
    CHECK_FALSE(stable_at(w, R(1), Y));
    REQUIRE(std::holds_alternative<EventId>(w.generate(R(1), op::Delete{X, {}})));
    w.quiesce();
    CHECK(w.replica(R(0)).objects.at(Y).inref.empty());
    w.generate(R(1), op::MayDelete{Y, {}});
    w.announce_round();
    w.announce_round();
    // The query was registered long ago; two rounds suffice.
    CHECK(stable_at(w, R(1), Y));
    CHECK(std::holds_alternative<EventId>(w.generate(R(1), op::Delete{Y, {}})));
  }

  TEST_CASE("oracle persistence along random executions") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const Trace t = random_execution(seed, TraceConfig{});
      World w(t.config.world());
      std::set<QueryKey> stable;
      w.set_observer([&](const Step&) {
        for (std::uint32_t r = 0; r < w.replica_count(); ++r) {
          for (const auto& q : w.replica(R(r)).stability.known) {
            if (oracle_stable(w, q)) {
              stable.insert(q);
            } else {
              CHECK_FALSE(stable.contains(q));
            }
          }
        }
      });
      replay_into(w, t);
    }
  }
}
