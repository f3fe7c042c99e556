#include "refcrdt/codec.hpp"

#include <stdexcept>

#include "refcrdt/detail/overloaded.hpp"

namespace refcrdt {

using detail::overloaded;

namespace {


std::uint32_t u32(const json& j) { return j.get<std::uint32_t>(); }

json optional_last(const std::optional<LastRefs>& l) { return l ? json(*l) : json(nullptr); }

std::optional<LastRefs> last_from(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return j.at(field).get<LastRefs>();
}

}  // namespace

void to_json(json& j, ReplicaId r) { j = r.value; }
void from_json(const json& j, ReplicaId& r) { r.value = u32(j); }

void to_json(json& j, EventId e) { j = json::array({e.replica.value, e.seq}); }
void from_json(const json& j, EventId& e) { e = EventId{ReplicaId{u32(j.at(0))}, u32(j.at(1))}; }

void to_json(json& j, ObjectKey k) { j = json::array({k.origin.value, k.counter}); }
void from_json(const json& j, ObjectKey& k) { k = ObjectKey{ReplicaId{u32(j.at(0))}, u32(j.at(1))}; }

void to_json(json& j, RefId r) { j = json::array({r.origin.value, r.counter}); }
void from_json(const json& j, RefId& r) { r = RefId{ReplicaId{u32(j.at(0))}, u32(j.at(1))}; }

void to_json(json& j, const VectorClock& c) {
  j = json::array();
  for (std::uint32_t i = 0; i < c.size(); ++i) j.push_back(c[ReplicaId{i}]);
}

void to_json(json& j, const CausalCut& c) {
  j = json::array();
  for (std::uint32_t i = 0; i < c.size(); ++i) {
    const auto& p = c[ReplicaId{i}];
    j.push_back(json::array({p.events, p.prefix}));
  }
}

void from_json(const json& j, CausalCut& c) {
  c = CausalCut(j.size());
  for (std::uint32_t i = 0; i < j.size(); ++i) {
    c[ReplicaId{i}] = ChainPosition{u32(j.at(i).at(0)), u32(j.at(i).at(1))};
  }
}

void to_json(json& j, const Slot& s) { j = json::array({json(s.object), s.attr}); }
void from_json(const json& j, Slot& s) {
  s.object = j.at(0).get<ObjectKey>();
  s.attr = j.at(1).get<std::string>();
}

void to_json(json& j, const LastRefs& l) {
  j = json::array();
  for (const auto& r : l.refs) j.push_back(r);
}
void from_json(const json& j, LastRefs& l) {
  l.refs.clear();
  for (const auto& r : j) l.refs.insert(r.get<RefId>());
}

void to_json(json& j, const OutRefEntry& e) {
  j = json{{"target", e.target ? json(*e.target) : json(nullptr)},
           {"ref", e.ref ? json(*e.ref) : json(nullptr)},
           {"dot", e.write_dot}};
}

void to_json(json& j, const OutRef& o) {
  j = json{{"entries", o.entries}, {"context", json::array()}};
  for (const auto& d : o.context) j["context"].push_back(d);
}

void to_json(json& j, const InRefPair& p) { j = json::array({json(p.source), json(p.ref)}); }

void to_json(json& j, const InRef& i) {
  j = json{{"added", json::array()}, {"removed", json::array()}};
  for (const auto& p : i.added) j["added"].push_back(p);
  for (const auto& p : i.removed) j["removed"].push_back(p);
}

void to_json(json& j, const ObjectRecord& r) {
  j = json{{"key", r.key},         {"label", r.label}, {"root", r.root},
           {"deleted", r.deleted}, {"inref", r.inref}, {"last_refs", r.last_refs_at_delete},
           {"attrs", json::object()}};
  for (const auto& [name, out] : r.attrs) j["attrs"][name] = out;
}

void to_json(json& j, const ObjectStore& s) {
  j = json::array();
  for (const auto& [key, obj] : s) j.push_back(obj);
}

void to_json(json& j, const Operation& op) {
  std::visit(overloaded{
                 [&](const op::CreateObject& c) {
                   j = json{{"root", c.root}, {"attrs", c.attrs}, {"label", c.label}};
                   if (c.key) j["key"] = *c.key;
                   if (c.anchor) j["anchor"] = *c.anchor;
                 },
                 [&](const op::Init& i) { j = json{{"source", i.source}, {"target", i.target}}; },
                 [&](const op::Assign& a) { j = json{{"dst", a.dst}, {"src", a.src}}; },
                 [&](const op::AssignNull& a) { j = json{{"slot", a.slot}}; },
                 [&](const op::Invoke& i) { j = json{{"slot", i.slot}}; },
                 [&](const op::MayDelete& m) {
                   j = json{{"target", m.target}, {"last", optional_last(m.last)}};
                 },
                 [&](const op::Delete& d) {
                   j = json{{"target", d.target}, {"last", optional_last(d.last)}};
                 },
                 [&](const op::Announce&) { j = json::object(); },
             },
             op);
  j["kind"] = op_name(op);
}

void from_json(const json& j, Operation& op) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "create") {
    op::CreateObject c;
    c.root = j.at("root").get<bool>();
    c.attrs = j.at("attrs").get<std::vector<std::string>>();
    c.label = j.value("label", std::string{});
    if (j.contains("key")) c.key = j.at("key").get<ObjectKey>();
    if (j.contains("anchor")) c.anchor = j.at("anchor").get<Slot>();
    op = c;
  } else if (kind == "init") {
    op = op::Init{j.at("source").get<Slot>(), j.at("target").get<ObjectKey>()};
  } else if (kind == "assign") {
    op = op::Assign{j.at("dst").get<Slot>(), j.at("src").get<Slot>()};
  } else if (kind == "assign_null") {
    op = op::AssignNull{j.at("slot").get<Slot>()};
  } else if (kind == "invoke") {
    op = op::Invoke{j.at("slot").get<Slot>()};
  } else if (kind == "may_delete") {
    op = op::MayDelete{j.at("target").get<ObjectKey>(), last_from(j, "last")};
  } else if (kind == "delete") {
    op = op::Delete{j.at("target").get<ObjectKey>(), last_from(j, "last")};
  } else if (kind == "announce") {
    op = op::Announce{};
  } else {
    throw std::invalid_argument("unknown operation kind '" + kind + "'");
  }
}

void to_json(json& j, const QueryKey& q) { j = json{{"target", q.target}, {"last", q.last}}; }

namespace {
std::string_view phase_name(QueryPhase p) {
  switch (p) {
    case QueryPhase::collecting: return "collecting";
    case QueryPhase::confirming: return "confirming";
    case QueryPhase::stable: return "stable";
    case QueryPhase::refuted: return "refuted";
  }
  return "?";
}

json cut_map(const std::map<ReplicaId, CausalCut>& m) {
  json j = json::array();
  for (const auto& [r, c] : m) j.push_back(json::array({json(r), json(c)}));
  return j;
}
}  // namespace

void to_json(json& j, const StabilityQuery& q) {
  j = json{{"key", q.key},
           {"phase", phase_name(q.phase)},
           {"collected", cut_map(q.collected)},
           {"target", q.target},
           {"confirmed", cut_map(q.confirmed)}};
}

void to_json(json& j, const StableFrontier& f) {
  j = json::array();
  for (std::uint32_t i = 0; i < f.replicas(); ++i) j.push_back(f.latest(ReplicaId{i}));
}

void to_json(json& j, const StabilityState& s) {
  j = json{{"known", json::array()}, {"own", json::array()}, {"frontier", s.frontier}};
  for (const auto& q : s.known) j["known"].push_back(q);
  for (const auto& [k, q] : s.own) j["own"].push_back(q);
}

void to_json(json& j, const QueryRegistration& r) {
  j = json{{"register", r.query}, {"from", r.from}};
}

void to_json(json& j, const ClockAnnouncement& a) {
  j = json{{"from", a.from}, {"cut", a.cut}, {"reports", json::array()}};
  for (const auto& r : a.reports) j["reports"].push_back(json::array({json(r.query), r.holds}));
}

}  // namespace refcrdt
