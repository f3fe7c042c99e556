#include <doctest.h>

#include <map>
#include <random>

#include "refcrdt/harness.hpp"
#include "refcrdt/invariants.hpp"
#include "refcrdt/world.hpp"
#include "support.hpp"

using namespace refcrdt;
using namespace refcrdt::testing;

namespace {

/// Roots A[a], B[b], C[c]; X referenced from A.a and Y from C.c; all
/// delivered to every replica.
struct ThreeRoots {
  World w;
  ObjectKey A, B, C, X, Y;
  explicit ThreeRoots(std::uint32_t replicas, CompositionMode mode = CompositionMode::pure_causal)
      : w(WorldConfig{replicas, mode, Fault::none}) {
    A = create_root(w, R(0), {"a"});
    B = create_root(w, R(0), {"b"});
    C = create_root(w, R(0), {"c"});
    X = create_at(w, R(0), Slot{A, "a"}, {});
    Y = create_at(w, R(0), Slot{C, "c"}, {});
    w.quiesce();
  }
};

}  // namespace

TEST_SUITE("world") {
  TEST_CASE("out-of-order messages are buffered") {
    World w(WorldConfig{2, CompositionMode::pure_causal, Fault::none});
    const ObjectKey A = create_root(w, R(0), {"a"});
    const EventId e = ev(w.generate(R(0), op::CreateObject{false, {}, "", {}, Slot{A, "a"}}));
    CHECK_FALSE(w.deliverable(R(1), MessageRef{e, 0}));
    CHECK(w.deliver(R(1), MessageRef{e, 1}) == DeliveryStatus::buffered);
    CHECK(w.replica(R(1)).buffer.size() == 1);
    CHECK(w.deliver(R(1), MessageRef{EventId{R(0), 1}, 0}) == DeliveryStatus::applied);
    CHECK(w.deliver(R(1), MessageRef{e, 0}) == DeliveryStatus::applied);
    CHECK(w.replica(R(1)).buffer.empty());
    CHECK(w.applied(R(1), MessageRef{e, 1}));
    CHECK_THROWS_AS(w.deliver(R(1), MessageRef{e, 1}), DuplicateDelivery);
    CHECK_THROWS_AS(w.deliver(R(0), MessageRef{e, 0}), DuplicateDelivery);
  }

  TEST_CASE("atomic mode sends one message per event") {
    ThreeRoots t(2, CompositionMode::atomic);
    const EventId e = ev(t.w.generate(R(0), op::Assign{Slot{t.B, "b"}, Slot{t.A, "a"}}));
    CHECK(t.w.message_count(t.w.event(e)) == 1);
    CHECK(t.w.event(e).chain.size() == 2);
    t.w.deliver(R(1), MessageRef{e, 0});
    CHECK(t.w.replica(R(1)).objects == t.w.replica(R(0)).objects);
  }

  TEST_CASE("quiesce is idempotent") {
    ThreeRoots t(3);
    const std::string s = t.w.serialize_state(true);
    t.w.quiesce();
    CHECK(t.w.serialize_state(true) == s);
    CHECK(t.w.quiescent());
  }

  TEST_CASE("sequential assignments leave one entry under every delivery order") {
    ThreeRoots t(3);
    t.w.generate(R(0), op::Assign{Slot{t.B, "b"}, Slot{t.A, "a"}});
    t.w.catch_up(R(1), t.w.replica(R(0)).applied);
    t.w.generate(R(1), op::Assign{Slot{t.B, "b"}, Slot{t.A, "a"}});
    const std::size_t states = for_each_delivery_order(t.w, [&](const World& w) {
      for (std::uint32_t r = 0; r < 3; ++r) {
        CHECK(targets(w, R(r), Slot{t.B, "b"}) == std::multiset<ObjectKey>{t.X});
        CHECK(null_entries(w, R(r), Slot{t.B, "b"}) == 0);
        std::size_t from_b = 0;
        for (const auto& p : w.replica(R(r)).objects.at(t.X).inref.current()) from_b += p.source == t.B;
        CHECK(from_b == 1);
      }
    });
    CHECK(states > 1);
  }

  TEST_CASE("assign_null concurrent with assign keeps both entries") {
    ThreeRoots t(2);
    t.w.generate(R(0), op::AssignNull{Slot{t.A, "a"}});
    t.w.generate(R(1), op::Assign{Slot{t.A, "a"}, Slot{t.C, "c"}});
    for_each_delivery_order(t.w, [&](const World& w) {
      for (std::uint32_t r = 0; r < 2; ++r) {
        CHECK(targets(w, R(r), Slot{t.A, "a"}) == std::multiset<ObjectKey>{t.Y});
        CHECK(null_entries(w, R(r), Slot{t.A, "a"}) == 1);
        CHECK(w.replica(R(r)).objects.at(t.X).inref.empty());
      }
    });
  }

  TEST_CASE("three concurrent assignments converge under every delivery order") {
    ThreeRoots t(3);
    t.w.generate(R(0), op::Assign{Slot{t.B, "b"}, Slot{t.A, "a"}});
    t.w.generate(R(1), op::Assign{Slot{t.B, "b"}, Slot{t.A, "a"}});
    t.w.generate(R(2), op::Assign{Slot{t.B, "b"}, Slot{t.C, "c"}});
    std::optional<std::string> first;
    for_each_delivery_order(t.w, [&](const World& w) {
      const std::string s = w.serialize_state();
      if (!first) first = s;
      CHECK(s == *first);
      CHECK_FALSE(check_convergence(w));
      CHECK_FALSE(check_exact_listing(w));
    });
  }

  TEST_CASE("random delivery orders of random executions converge") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const Trace t = random_execution(seed, TraceConfig{});
      std::uint64_t gens = 0;
      World base(t.config.world());
      // Generate steps in trace order, letting the origin catch up first.
      for (const Step& s : t.steps) {
        if (const auto* g = std::get_if<GenerateStep>(&s)) {
          if (g->deps) base.catch_up(g->replica, *g->deps);
          base.generate(g->replica, g->op);
          ++gens;
        }
      }
      std::optional<std::string> first;
      for (int order = 0; order < 5; ++order) {
        World w = base;
        std::mt19937_64 rng(seed * 31 + order);
        for (;;) {
          std::vector<std::pair<ReplicaId, MessageRef>> ready;
          for (std::uint32_t r = 0; r < w.replica_count(); ++r) {
            for (std::uint32_t o = 0; o < w.replica_count(); ++o) {
              auto m = w.next_message(R(r), R(o));
              if (m && w.deliverable(R(r), *m)) ready.emplace_back(R(r), *m);
            }
          }
          if (ready.empty()) break;
          const auto& [r, m] = ready[rng() % ready.size()];
          w.deliver(r, m);
        }
        w.quiesce();
        CHECK_FALSE(check_convergence(w));
        const std::string s = w.serialize_state();
        if (!first) first = s;
        CHECK(s == *first);
      }
      CHECK(gens > 0);
    }
  }

  TEST_CASE("delivery respects causality and chain order") {
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
      const Trace t = random_execution(seed, TraceConfig{});
      World w(t.config.world());
      std::map<std::pair<std::uint32_t, EventId>, std::uint32_t> next;
      w.set_observer([&](const Step& s) {
        const auto* d = std::get_if<DeliverStep>(&s);
        if (!d) return;
        const Event& e = w.event(d->event);
        const std::uint32_t expected = next[{d->replica.value, d->event}];
        CHECK(d->chain_index == expected);
        next[{d->replica.value, d->event}] = expected + 1;
        CHECK(e.deps.leq(w.replica(d->replica).applied));
      });
      replay_into(w, t);
    }
  }
}
