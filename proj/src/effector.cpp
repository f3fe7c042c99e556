#include "refcrdt/effector.hpp"

#include "refcrdt/detail/overloaded.hpp"

#include <stdexcept>

namespace refcrdt {

namespace {

using detail::overloaded;

ObjectRecord& object_at(ObjectStore& store, ObjectKey key) {
  auto it = store.find(key);
  if (it == store.end()) {
    throw std::logic_error("effector addressed to unknown object " + to_string(key));
  }
  return it->second;
}

std::string entry_string(const OutRefEntry& e) {
  if (e.is_null()) return "null";
  return to_string(*e.target) + to_string(*e.ref);
}

}  // namespace

ObjectKey effector_object(const Effector& e) {
  return std::visit(overloaded{
                        [](const fx::CreateObject& c) { return c.key; },
                        [](const fx::InrefAdd& a) { return a.target; },
                        [](const fx::InrefRemove& r) { return r.target; },
                        [](const fx::OutrefSet& s) { return s.slot.object; },
                        [](const fx::MarkDeleted& m) { return m.object; },
                    },
                    e);
}

void apply_effector(ObjectStore& store, const Effector& e) {
  std::visit(overloaded{
                 [&](const fx::CreateObject& c) {
                   ObjectRecord rec;
                   rec.key = c.key;
                   rec.label = c.label;
                   rec.root = c.root;
                   for (const auto& name : c.attrs) {
                     OutRef& out = rec.attrs[name];
                     out.entries.push_back(OutRefEntry::null(c.dot));
                     out.context.insert(c.dot);
                   }
                   store.insert_or_assign(c.key, std::move(rec));
                 },
                 [&](const fx::InrefAdd& a) { object_at(store, a.target).inref.added.insert(a.pair); },
                 // Recorded even if the pair was never added; I4 flags that.
                 [&](const fx::InrefRemove& r) {
                   object_at(store, r.target).inref.removed.insert(r.pair);
                 },
                 [&](const fx::OutrefSet& s) {
                   OutRef& out = object_at(store, s.slot.object).attrs[s.slot.attr];
                   out = mvr_assign(out, s.entries, s.dot, s.observed).value;
                 },
                 [&](const fx::MarkDeleted& m) {
                   ObjectRecord& obj = object_at(store, m.object);
                   obj.deleted = true;
                   obj.last_refs_at_delete.refs.insert(m.last.refs.begin(), m.last.refs.end());
                 },
             },
             e);
}

std::string summarize(const Effector& e) {
  return std::visit(
      overloaded{
          [](const fx::CreateObject& c) {
            return std::string("create ") + to_string(c.key) + (c.root ? " root" : "");
          },
          [](const fx::InrefAdd& a) {
            return "inref-add " + to_string(a.target) + "<-" + to_string(a.pair.source) +
                   to_string(a.pair.ref);
          },
          [](const fx::InrefRemove& r) {
            return "inref-remove " + to_string(r.target) + "<-" + to_string(r.pair.source) +
                   to_string(r.pair.ref);
          },
          [](const fx::OutrefSet& s) {
            std::string out = "outref-set " + to_string(s.slot.object) + "." + s.slot.attr + "={";
            for (std::size_t i = 0; i < s.entries.size(); ++i) {
              if (i) out += ",";
              out += entry_string(s.entries[i]);
            }
            return out + "}";
          },
          [](const fx::MarkDeleted& m) { return "mark-deleted " + to_string(m.object); },
      },
      e);
}

}  // namespace refcrdt
