#include "refcrdt/refs.hpp"

#include <algorithm>
#include <iterator>
#include <tuple>

namespace refcrdt {

MvrResult mvr_assign(const OutRef& out, const std::vector<OutRefEntry>& new_entries,
                     EventId write_dot, const std::set<EventId>& observed) {
  MvrResult r;
  for (const auto& e : out.entries) {
    if (observed.contains(e.write_dot)) {
      r.overwritten.push_back(e);
    } else {
      r.value.entries.push_back(e);
    }
  }
  for (auto e : new_entries) {
    e.write_dot = write_dot;
    r.value.entries.push_back(e);
  }
  std::sort(r.value.entries.begin(), r.value.entries.end(),
            [](const OutRefEntry& a, const OutRefEntry& b) {
              return std::tie(a.write_dot, a.target, a.ref) < std::tie(b.write_dot, b.target, b.ref);
            });
  r.value.context = out.context;
  r.value.context.insert(observed.begin(), observed.end());
  r.value.context.insert(write_dot);
  return r;
}

std::set<InRefPair> InRef::current() const {
  std::set<InRefPair> out;
  std::set_difference(added.begin(), added.end(), removed.begin(), removed.end(),
                      std::inserter(out, out.end()));
  return out;
}

bool InRef::empty() const {
  return std::all_of(added.begin(), added.end(),
                     [&](const InRefPair& p) { return removed.contains(p); });
}

bool InRef::well_formed() const {
  return std::includes(added.begin(), added.end(), removed.begin(), removed.end());
}

bool listing_within(const ObjectRecord& object, const LastRefs& last) {
  for (const auto& p : object.inref.added) {
    if (object.inref.removed.contains(p)) continue;
    if (p.source != object.key || !last.contains(p.ref)) return false;
  }
  return true;
}

LastRefs self_refs(const ObjectRecord& object) {
  LastRefs out;
  for (const auto& [name, out_ref] : object.attrs) {
    for (const auto& e : out_ref.entries) {
      if (e.target == object.key) out.refs.insert(*e.ref);
    }
  }
  return out;
}

bool accessible(const ObjectStore& store, ObjectKey key) {
  auto it = store.find(key);
  if (it == store.end() || it->second.deleted) return false;
  if (it->second.root) return true;
  const InRef& in = it->second.inref;
  for (const auto& p : in.added) {
    if (p.source == key || in.removed.contains(p)) continue;
    auto src = store.find(p.source);
    if (src == store.end()) continue;
    for (const auto& [name, out_ref] : src->second.attrs) {
      for (const auto& e : out_ref.entries) {
        if (e.ref == p.ref) return true;
      }
    }
  }
  return false;
}

std::size_t count_edges(const ObjectStore& store) {
  std::size_t n = 0;
  for (const auto& [key, obj] : store) {
    for (const auto& [name, out_ref] : obj.attrs) {
      for (const auto& e : out_ref.entries) n += e.is_null() ? 0 : 1;
    }
  }
  return n;
}

}  // namespace refcrdt
