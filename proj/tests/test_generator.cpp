#include <doctest.h>

#include "refcrdt/world.hpp"
#include "support.hpp"

using namespace refcrdt;
using namespace refcrdt::testing;

namespace {

template <class... Fx>
bool shape(const Event& e) {
  if (e.chain.size() != sizeof...(Fx)) return false;
  std::size_t i = 0;
  return (std::holds_alternative<Fx>(e.chain[i++]) && ...);
}

struct Base {
  World w{WorldConfig{2, CompositionMode::pure_causal, Fault::none}};
  ObjectKey A, B, X;
  Base() {
    A = create_root(w, R(0), {"a"});
    B = create_root(w, R(0), {"b"});
    X = create_at(w, R(0), Slot{A, "a"}, {"x"});
  }
  const ObjectRecord& obj(ObjectKey k, std::uint32_t r = 0) const {
    return w.replica(R(r)).objects.at(k);
  }
};

}  // namespace

TEST_SUITE("generator") {
  TEST_CASE("create shapes") {
    Base b;
    CHECK(shape<fx::CreateObject>(b.w.event(EventId{R(0), 1})));
    CHECK(shape<fx::CreateObject, fx::InrefAdd, fx::OutrefSet>(b.w.event(EventId{R(0), 3})));
    CHECK(null_entries(b.w, R(0), Slot{b.A, "a"}) == 0);
    CHECK(targets(b.w, R(0), Slot{b.A, "a"}) == std::multiset<ObjectKey>{b.X});
    CHECK(null_entries(b.w, R(0), Slot{b.X, "x"}) == 1);
    CHECK(b.obj(b.X).inref.current().size() == 1);
  }

  TEST_CASE("create refuses a used or foreign key") {
    Base b;
    const Outcome o = b.w.generate(R(0), op::CreateObject{true, {}, "", b.A, {}});
    CHECK(std::get<Failure>(o) == Failure::KeyInUse);
    const Outcome f = b.w.generate(R(1), op::CreateObject{true, {}, "", ObjectKey{R(0), 99}, {}});
    CHECK(std::get<Failure>(f) == Failure::KeyInUse);
    CHECK(b.w.events(R(0)).size() == 3);
    CHECK(b.w.events(R(1)).empty());
  }

  TEST_CASE("init lists the reference before storing it") {
    Base b;
    const EventId e = ev(b.w.generate(R(0), op::Init{Slot{b.B, "b"}, b.X}));
    CHECK(shape<fx::InrefAdd, fx::OutrefSet>(b.w.event(e)));
    CHECK(targets(b.w, R(0), Slot{b.B, "b"}) == std::multiset<ObjectKey>{b.X});
    CHECK(b.obj(b.X).inref.current().contains(InRefPair{b.B, ref_minted_by(e)}));
    CHECK(b.obj(b.X).inref.current().size() == 2);
  }

  TEST_CASE("init over an existing entry removes the old listing") {
    Base b;
    const ObjectKey Y = create_at(b.w, R(0), Slot{b.B, "b"}, {});
    const RefId old = *b.obj(b.B).attrs.at("b").entries.at(0).ref;
    const EventId e = ev(b.w.generate(R(0), op::Init{Slot{b.B, "b"}, b.X}));
    const Event& event = b.w.event(e);
    REQUIRE(shape<fx::InrefAdd, fx::OutrefSet, fx::InrefRemove>(event));
    const auto& rm = std::get<fx::InrefRemove>(event.chain[2]);
    CHECK(rm.target == Y);
    CHECK(rm.pair == InRefPair{b.B, old});
    CHECK(b.obj(Y).inref.empty());
  }

  TEST_CASE("self reference init") {
    Base b;
    const EventId e = ev(b.w.generate(R(0), op::Init{Slot{b.X, "x"}, b.X}));
    CHECK(b.obj(b.X).inref.current().contains(InRefPair{b.X, ref_minted_by(e)}));
    CHECK(self_refs(b.obj(b.X)) == LastRefs{{ref_minted_by(e)}});
  }

  TEST_CASE("assign copies a single-valued source") {
    Base b;
    const EventId e = ev(b.w.generate(R(0), op::Assign{Slot{b.B, "b"}, Slot{b.A, "a"}}));
    CHECK(shape<fx::InrefAdd, fx::OutrefSet>(b.w.event(e)));
    CHECK(targets(b.w, R(0), Slot{b.B, "b"}) == std::multiset<ObjectKey>{b.X});
    const Outcome n = b.w.generate(R(0), op::Assign{Slot{b.A, "a"}, Slot{b.X, "x"}});
    CHECK(std::get<Failure>(n) == Failure::NullSource);
  }

  TEST_CASE("assign_null removes overwritten listings") {
    Base b;
    const EventId e = ev(b.w.generate(R(0), op::AssignNull{Slot{b.A, "a"}}));
    CHECK(shape<fx::OutrefSet, fx::InrefRemove>(b.w.event(e)));
    CHECK(b.obj(b.X).inref.empty());
    const EventId again = ev(b.w.generate(R(0), op::AssignNull{Slot{b.A, "a"}}));
    CHECK(shape<fx::OutrefSet>(b.w.event(again)));
  }

  TEST_CASE("unreachable objects cannot be used") {
    Base b;
    b.w.generate(R(0), op::AssignNull{Slot{b.A, "a"}});
    const Outcome o = b.w.generate(R(0), op::Init{Slot{b.B, "b"}, b.X});
    CHECK(std::get<Failure>(o) == Failure::UnreachableTarget);
    const Outcome s = b.w.generate(R(0), op::AssignNull{Slot{b.X, "x"}});
    CHECK(std::get<Failure>(s) == Failure::UnreachableTarget);
  }

  TEST_CASE("slot failures") {
    Base b;
    CHECK(std::get<Failure>(b.w.generate(R(0), op::AssignNull{Slot{b.A, "zz"}})) ==
          Failure::UnknownAttribute);
    CHECK(std::get<Failure>(b.w.generate(R(0), op::AssignNull{Slot{ObjectKey{R(1), 9}, "a"}})) ==
          Failure::UnknownObject);
    CHECK(std::get<Failure>(b.w.generate(R(1), op::Invoke{Slot{b.A, "a"}})) ==
          Failure::UnknownObject);
  }

  TEST_CASE("invoke") {
    Base b;
    CHECK(std::get<ObjectKey>(b.w.generate(R(0), op::Invoke{Slot{b.A, "a"}})) == b.X);
    CHECK(std::get<Failure>(b.w.generate(R(0), op::Invoke{Slot{b.X, "x"}})) ==
          Failure::NullReference);
  }

  TEST_CASE("delete preconditions") {
    Base b;
    CHECK(std::get<Failure>(b.w.generate(R(0), op::Delete{b.A, {}})) == Failure::RootObject);
    CHECK(std::get<Failure>(b.w.generate(R(0), op::Delete{b.X, {}})) == Failure::NotUnreachable);
    CHECK(std::get<Failure>(b.w.generate(R(0), op::Delete{b.X, LastRefs{{RefId{R(0), 1}}}})) ==
          Failure::InvalidLastRefs);
    // Locally unreferenced is not enough without a stable query.
    b.w.generate(R(0), op::AssignNull{Slot{b.A, "a"}});
    b.w.quiesce();
    CHECK(std::get<Failure>(b.w.generate(R(0), op::Delete{b.X, {}})) == Failure::NotUnreachable);
    CHECK(b.w.events(R(0)).size() == 4);
  }

  TEST_CASE("delete chain retires outrefs then the object") {
    Base b;
    b.w.generate(R(0), op::Init{Slot{b.X, "x"}, b.B});
    b.w.generate(R(0), op::AssignNull{Slot{b.A, "a"}});
    b.w.quiesce();
    CHECK(std::get<bool>(b.w.generate(R(0), op::MayDelete{b.X, {}})) == false);
    b.w.quiesce();
    b.w.announce_round();
    b.w.announce_round();
    const EventId e = ev(b.w.generate(R(0), op::Delete{b.X, {}}));
    CHECK(shape<fx::OutrefSet, fx::InrefRemove, fx::MarkDeleted>(b.w.event(e)));
    CHECK(b.obj(b.X).deleted);
    CHECK(b.obj(b.B).inref.empty());
    CHECK(std::get<Failure>(b.w.generate(R(0), op::Delete{b.X, {}})) == Failure::AlreadyDeleted);
  }

  TEST_CASE("build_chain leaves the store untouched") {
    Base b;
    const ObjectStore before = b.w.replica(R(0)).objects;
    auto chain = build_chain(before, EventId{R(0), 9}, op::AssignNull{Slot{b.A, "a"}},
                             [](ObjectKey, const LastRefs&) { return false; });
    CHECK(std::holds_alternative<Chain>(chain));
    CHECK(b.w.replica(R(0)).objects == before);
  }
}
