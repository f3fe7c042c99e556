#include <doctest.h>

#include <vector>

#include "refcrdt/clock.hpp"

using namespace refcrdt;

TEST_SUITE("clock") {
  TEST_CASE("missing entries read as zero") {
    VectorClock c(2);
    CHECK(c[ReplicaId{5}] == 0);
    c.set(ReplicaId{1}, 4);
    CHECK(c[ReplicaId{1}] == 4);
  }

  TEST_CASE("pointwise order and merge") {
    VectorClock a(3), b(3);
    a.set(ReplicaId{0}, 2);
    b.set(ReplicaId{1}, 1);
    CHECK_FALSE(a.leq(b));
    CHECK_FALSE(b.leq(a));
    VectorClock m = a;
    m.merge(b);
    CHECK(a.leq(m));
    CHECK(b.leq(m));
    CHECK(m[ReplicaId{0}] == 2);
    CHECK(m[ReplicaId{1}] == 1);
    CHECK(VectorClock(3).leq(a));
  }

  TEST_CASE("pointwise min") {
    VectorClock a(2), b(2);
    a.set(ReplicaId{0}, 5);
    a.set(ReplicaId{1}, 1);
    b.set(ReplicaId{0}, 2);
    b.set(ReplicaId{1}, 7);
    const std::vector<VectorClock> v{a, b};
    const VectorClock m = VectorClock::pointwise_min(v);
    CHECK(m[ReplicaId{0}] == 2);
    CHECK(m[ReplicaId{1}] == 1);
  }

  TEST_CASE("chain positions order lexicographically") {
    CHECK(ChainPosition{1, 2} < ChainPosition{2, 0});
    CHECK(ChainPosition{1, 0} < ChainPosition{1, 1});
  }

  TEST_CASE("causal cut order, merge and complete events") {
    CausalCut a(2), b(2);
    a[ReplicaId{0}] = {1, 2};
    b[ReplicaId{0}] = {2, 0};
    b[ReplicaId{1}] = {0, 1};
    CHECK(a.leq(b));
    CHECK_FALSE(b.leq(a));
    CausalCut m = a;
    m.merge(b);
    CHECK(m == b);
    const VectorClock c = a.complete();
    CHECK(c[ReplicaId{0}] == 1);
    CHECK(c[ReplicaId{1}] == 0);
  }
}
