#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "refcrdt/ids.hpp"

namespace refcrdt {

/// An attribute of an object: the location of one outref.
struct Slot {
  ObjectKey object;
  std::string attr;

  auto operator<=>(const Slot&) const = default;
};

/// One value of an outref register. A NULL entry has neither target nor ref.
struct OutRefEntry {
  std::optional<ObjectKey> target;
  std::optional<RefId> ref;
  EventId write_dot;

  bool is_null() const { return !target.has_value(); }

  auto operator<=>(const OutRefEntry&) const = default;

  static OutRefEntry null(EventId dot) { return OutRefEntry{std::nullopt, std::nullopt, dot}; }
  static OutRefEntry to(ObjectKey target, RefId ref, EventId dot) {
    return OutRefEntry{target, ref, dot};
  }
};

/// Multi-value register of reference entries held by one attribute.
///
/// `context` holds every write dot this replica has observed for the
/// register. An assignment removes exactly the entries whose dot its writer
/// had observed, so concurrent assignments all survive.
struct OutRef {
  std::vector<OutRefEntry> entries;  // sorted by write_dot
  std::set<EventId> context;

  bool single_valued() const { return entries.size() == 1; }

  bool operator==(const OutRef&) const = default;
};

struct MvrResult {
  OutRef value;
  std::vector<OutRefEntry> overwritten;
};

/// Applies one assignment carrying `new_entries` under `write_dot`.
/// Entries whose dot is in `observed` are removed and returned; the others
/// were concurrent with this write and survive next to the new entries.
MvrResult mvr_assign(const OutRef& out, const std::vector<OutRefEntry>& new_entries,
                     EventId write_dot, const std::set<EventId>& observed);

/// A (source, ref) listing entry on a target object.
struct InRefPair {
  ObjectKey source;
  RefId ref;

  auto operator<=>(const InRefPair&) const = default;
};

/// Reference listing of a target: a two-set of (source, ref) pairs.
struct InRef {
  std::set<InRefPair> added;
  std::set<InRefPair> removed;

  std::set<InRefPair> current() const;
  bool empty() const;
  /// removed ⊆ added
  bool well_formed() const;

  bool operator==(const InRef&) const = default;
};

/// References a deletion check ignores. Only self references (pairs whose
/// source is the target itself) can be ignored; see `listing_within`.
struct LastRefs {
  std::set<RefId> refs;

  bool contains(RefId r) const { return refs.contains(r); }

  auto operator<=>(const LastRefs&) const = default;
};

struct ObjectRecord {
  ObjectKey key;
  std::string label;
  bool root = false;
  InRef inref;
  std::map<std::string, OutRef> attrs;
  bool deleted = false;
  LastRefs last_refs_at_delete;

  bool operator==(const ObjectRecord&) const = default;
};

using ObjectStore = std::map<ObjectKey, ObjectRecord>;

/// Every current listing pair of `object` is a self reference named in
/// `last`. This is the per-replica condition that deletion waits on.
bool listing_within(const ObjectRecord& object, const LastRefs& last);

/// Refs of entries in the object's own attributes that point back at it.
LastRefs self_refs(const ObjectRecord& object);

/// Whether an application at this replica can reach `key`: it exists, is
/// not deleted, and is either a root or the target of an outref entry held
/// by some other object whose listing pair is present.
bool accessible(const ObjectStore& store, ObjectKey key);

/// Number of non-NULL outref entries across the store.
std::size_t count_edges(const ObjectStore& store);

}  // namespace refcrdt
