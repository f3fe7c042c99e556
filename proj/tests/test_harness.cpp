#include <doctest.h>

#include <set>

#include "refcrdt/harness.hpp"
#include "refcrdt/invariants.hpp"

using namespace refcrdt;

namespace {

std::size_t generates(const Trace& t) {
  std::size_t n = 0;
  for (const auto& s : t.steps) n += std::holds_alternative<GenerateStep>(s);
  return n;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("rng is deterministic and in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.below(7);
      CHECK(x < 7);
      CHECK(x == b.below(7));
    }
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(1, i));
    CHECK(seeds.size() == 1000);
  }

  TEST_CASE("random executions are deterministic") {
    const Trace a = random_execution(9, TraceConfig{});
    const Trace b = random_execution(9, TraceConfig{});
    CHECK(a == b);
    CHECK(serialize(a) == serialize(b));
    TraceConfig no_settle;
    no_settle.settle_permille = 0;
    CHECK(random_execution(9, no_settle).generate_count() == 20);
    CHECK_FALSE(a == random_execution(10, TraceConfig{}));
  }

  TEST_CASE("checked execution agrees with replay checking") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const Execution e = random_execution_checked(seed, TraceConfig{});
      CHECK(e.report == check_invariants(e.trace));
      CHECK(e.report.ok());
      CHECK(convergence_check(e.trace));
    }
  }

  TEST_CASE("create-only executions create one object per event") {
    TraceConfig c;
    c.events = 3;
    c.weights = OpWeights{1, 0, 0, 0, 0, 0, 0, 0};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      World w = replay(random_execution(seed, c));
      w.quiesce();
      for (std::uint32_t r = 0; r < w.replica_count(); ++r) {
        CHECK(w.replica(ReplicaId{r}).objects.size() == 3);
      }
    }
  }

  TEST_CASE("most default executions reach a multi-valued outref") {
    std::size_t multi = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      multi += random_execution_checked(derive_seed(3, i), TraceConfig{}).report.saw_multivalued;
    }
    MESSAGE("multi-valued: " << multi << " / 1000");
    CHECK(multi > 500);
  }

  TEST_CASE("injected faults are found and shrunk") {
    for (Fault f : {Fault::outref_before_inref, Fault::skip_stability}) {
      CampaignOptions o;
      o.executions = 300;
      o.config.fault = f;
      o.keep_failures = 1;
      const CampaignSummary s = run_campaign(o);
      REQUIRE(s.failing_executions > 0);
      CHECK(s.violations(Invariant::referential_integrity) > 0);
      const CampaignFailure& fail = s.failures.at(0);
      const InvariantReport shrunk = check_invariants(fail.trace);
      CHECK_FALSE(shrunk.passed(fail.first.which));
      const Trace original = random_execution(fail.seed, o.config);
      CHECK(generates(fail.trace) <= generates(original));
      CHECK(fail.trace.steps.size() <= original.steps.size());
    }
  }

  TEST_CASE("shrinking a passing trace is refused") {
    CHECK_THROWS_AS(shrink(random_execution(1, TraceConfig{})), NotFailing);
  }

  TEST_CASE("campaign results do not depend on thread count") {
    CampaignOptions o;
    o.executions = 400;
    o.config.fault = Fault::outref_before_inref;
    o.threads = 1;
    const CampaignSummary one = run_campaign(o);
    o.threads = 4;
    const CampaignSummary four = run_campaign(o);
    CHECK(one.violating_executions == four.violating_executions);
    CHECK(one.multivalued_executions == four.multivalued_executions);
    REQUIRE(one.failures.size() == four.failures.size());
    for (std::size_t i = 0; i < one.failures.size(); ++i) {
      CHECK(one.failures[i].index == four.failures[i].index);
      CHECK(serialize(one.failures[i].trace) == serialize(four.failures[i].trace));
    }
  }

  TEST_CASE("invoke never yields a deleted object") {
    std::size_t invoked = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const Trace t = random_execution(derive_seed(11, i), TraceConfig{});
      World w(t.config.world());
      w.set_observer([&](const Step& s) {
        ReplicaId r;
        if (const auto* g = std::get_if<GenerateStep>(&s)) {
          r = g->replica;
        } else if (const auto* d = std::get_if<DeliverStep>(&s)) {
          r = d->replica;
        } else {
          return;
        }
        const ObjectStore& store = w.replica(r).objects;
        for (const auto& [key, obj] : store) {
          if (obj.deleted) continue;
          for (const auto& [name, out] : obj.attrs) {
            auto target = invoke_target(store, Slot{key, name});
            if (const auto* k = std::get_if<ObjectKey>(&target)) {
              ++invoked;
              REQUIRE(store.contains(*k));
              REQUIRE_FALSE(store.at(*k).deleted);
            }
          }
        }
      });
      replay_into(w, t);
    }
    CHECK(invoked > 0);
  }
}
