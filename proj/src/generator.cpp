#include "refcrdt/generator.hpp"

#include <algorithm>

#include "refcrdt/detail/overloaded.hpp"

namespace refcrdt {

namespace {

using detail::overloaded;

const ObjectRecord* find(const ObjectStore& store, ObjectKey key) {
  auto it = store.find(key);
  return it == store.end() ? nullptr : &it->second;
}

/// A slot the application is about to read or write.
std::optional<Failure> check_slot(const ObjectStore& store, const Slot& slot) {
  const ObjectRecord* obj = find(store, slot.object);
  if (!obj) return Failure::UnknownObject;
  if (obj->deleted) return Failure::DeletedObject;
  if (!obj->attrs.contains(slot.attr)) return Failure::UnknownAttribute;
  if (!accessible(store, slot.object)) return Failure::UnreachableTarget;
  return std::nullopt;
}

/// outref-set of `slot` followed by the removal of every overwritten
/// non-NULL entry from its target's listing.
void append_write(Chain& chain, const ObjectStore& store, const Slot& slot, OutRefEntry entry,
                  EventId id) {
  const OutRef& out = store.at(slot.object).attrs.at(slot.attr);
  entry.write_dot = id;
  chain.push_back(fx::OutrefSet{slot, {entry}, id, out.context});

  std::vector<OutRefEntry> gone;
  for (const auto& e : out.entries) {
    if (!e.is_null()) gone.push_back(e);
  }
  std::sort(gone.begin(), gone.end(),
            [](const OutRefEntry& a, const OutRefEntry& b) { return *a.ref < *b.ref; });
  for (const auto& e : gone) {
    chain.push_back(fx::InrefRemove{*e.target, InRefPair{slot.object, *e.ref}});
  }
}

/// Backward pattern: list the new reference at the target, then store it.
void append_reference(Chain& chain, const ObjectStore& store, const Slot& slot, ObjectKey target,
                      EventId id, Fault fault) {
  const RefId ref = ref_minted_by(id);
  const std::size_t add_at = chain.size();
  chain.push_back(fx::InrefAdd{target, InRefPair{slot.object, ref}});
  append_write(chain, store, slot, OutRefEntry::to(target, ref, id), id);
  if (fault == Fault::outref_before_inref) std::swap(chain[add_at], chain[add_at + 1]);
}

std::variant<Chain, Failure> create(const ObjectStore& store, EventId id,
                                    const op::CreateObject& c, Fault fault) {
  const ObjectKey key = c.key.value_or(key_minted_by(id));
  if (key.origin != id.replica || store.contains(key)) return Failure::KeyInUse;
  if (c.anchor) {
    if (auto f = check_slot(store, *c.anchor)) return *f;
  }
  Chain chain;
  chain.push_back(fx::CreateObject{key, c.label, c.root, c.attrs, id});
  if (c.anchor) append_reference(chain, store, *c.anchor, key, id, fault);
  return chain;
}

std::variant<Chain, Failure> init(const ObjectStore& store, EventId id, const op::Init& i,
                                  Fault fault) {
  if (auto f = check_slot(store, i.source)) return *f;
  const ObjectRecord* target = find(store, i.target);
  if (!target) return Failure::UnknownObject;
  if (target->deleted) return Failure::DeletedObject;
  if (!accessible(store, i.target)) return Failure::UnreachableTarget;
  Chain chain;
  append_reference(chain, store, i.source, i.target, id, fault);
  return chain;
}

std::variant<Chain, Failure> assign(const ObjectStore& store, EventId id, const op::Assign& a,
                                    Fault fault) {
  if (auto f = check_slot(store, a.src)) return *f;
  const OutRef& src = store.at(a.src.object).attrs.at(a.src.attr);
  if (!src.single_valued()) return Failure::MultiValued;
  const OutRefEntry& value = src.entries.front();
  if (value.is_null()) return Failure::NullSource;
  if (auto f = check_slot(store, a.dst)) return *f;
  const ObjectRecord* target = find(store, *value.target);
  if (!target) return Failure::UnknownObject;
  if (target->deleted) return Failure::DeletedObject;
  Chain chain;
  append_reference(chain, store, a.dst, *value.target, id, fault);
  return chain;
}

std::variant<Chain, Failure> assign_null(const ObjectStore& store, EventId id,
                                         const op::AssignNull& a) {
  if (auto f = check_slot(store, a.slot)) return *f;
  Chain chain;
  append_write(chain, store, a.slot, OutRefEntry::null(id), id);
  return chain;
}

std::variant<Chain, Failure> remove(const ObjectStore& store, EventId id, const op::Delete& d,
                                    const StablyCheck& stably, Fault fault) {
  const ObjectRecord* obj = find(store, d.target);
  if (!obj) return Failure::UnknownObject;
  if (obj->root) return Failure::RootObject;
  if (obj->deleted) return Failure::AlreadyDeleted;
  const LastRefs last = resolve_last(store, d.target, d.last);
  const LastRefs own = self_refs(*obj);
  if (!std::includes(own.refs.begin(), own.refs.end(), last.refs.begin(), last.refs.end())) {
    return Failure::InvalidLastRefs;
  }
  const bool allowed =
      fault == Fault::skip_stability ? listing_within(*obj, last) : stably(d.target, last);
  if (!allowed) return Failure::NotUnreachable;

  // Forward pattern: retire the outgoing references, then the object.
  Chain chain;
  for (const auto& [name, out] : obj->attrs) {
    append_write(chain, store, Slot{d.target, name}, OutRefEntry::null(id), id);
  }
  chain.push_back(fx::MarkDeleted{d.target, last});
  return chain;
}

}  // namespace

std::variant<Chain, Failure> build_chain(const ObjectStore& local, EventId id,
                                         const Operation& op, const StablyCheck& stably,
                                         Fault fault) {
  return std::visit(
      overloaded{
          [&](const op::CreateObject& c) -> std::variant<Chain, Failure> {
            return create(local, id, c, fault);
          },
          [&](const op::Init& i) -> std::variant<Chain, Failure> { return init(local, id, i, fault); },
          [&](const op::Assign& a) -> std::variant<Chain, Failure> {
            return assign(local, id, a, fault);
          },
          [&](const op::AssignNull& a) -> std::variant<Chain, Failure> {
            return assign_null(local, id, a);
          },
          [&](const op::Delete& d) -> std::variant<Chain, Failure> {
            return remove(local, id, d, stably, fault);
          },
          [](const auto&) -> std::variant<Chain, Failure> {
            throw std::invalid_argument("build_chain: not an update operation");
          },
      },
      op);
}

std::variant<ObjectKey, Failure> invoke_target(const ObjectStore& local, const Slot& slot) {
  const ObjectRecord* obj = find(local, slot.object);
  if (!obj) return Failure::UnknownObject;
  if (obj->deleted) return Failure::DeletedObject;
  auto it = obj->attrs.find(slot.attr);
  if (it == obj->attrs.end()) return Failure::UnknownAttribute;
  if (!it->second.single_valued()) return Failure::MultiValued;
  const OutRefEntry& e = it->second.entries.front();
  if (e.is_null()) return Failure::NullReference;
  return *e.target;
}

LastRefs resolve_last(const ObjectStore& local, ObjectKey target,
                      const std::optional<LastRefs>& last) {
  if (last) return *last;
  const ObjectRecord* obj = find(local, target);
  return obj ? self_refs(*obj) : LastRefs{};
}

}  // namespace refcrdt
