#include <cstring>

#include "refcrdt/detail/overloaded.hpp"
#include "refcrdt/world.hpp"

namespace refcrdt {

namespace {

using detail::overloaded;

class Encoder {
 public:
  explicit Encoder(std::string& out) : out_(out) {}

  void put(std::uint64_t v) {
    // LEB128: the key stays short for the small numbers that dominate.
    do {
      auto byte = static_cast<char>(v & 0x7f);
      v >>= 7;
      if (v) byte = static_cast<char>(byte | 0x80);
      out_.push_back(byte);
    } while (v);
  }
  void put(bool b) { out_.push_back(b ? 1 : 0); }
  void put(const std::string& s) {
    put(static_cast<std::uint64_t>(s.size()));
    out_ += s;
  }
  void put(ReplicaId r) { put(std::uint64_t{r.value}); }
  void put(EventId e) {
    put(std::uint64_t{e.replica.value});
    put(std::uint64_t{e.seq});
  }
  void put(ObjectKey k) {
    put(std::uint64_t{k.origin.value});
    put(std::uint64_t{k.counter});
  }
  void put(RefId r) {
    put(std::uint64_t{r.origin.value});
    put(std::uint64_t{r.counter});
  }
  void put(const Slot& s) {
    put(s.object);
    put(s.attr);
  }
  void put(const VectorClock& c) {
    put(static_cast<std::uint64_t>(c.size()));
    for (std::uint32_t i = 0; i < c.size(); ++i) put(std::uint64_t{c[ReplicaId{i}]});
  }
  void put(const CausalCut& c) {
    put(static_cast<std::uint64_t>(c.size()));
    for (std::uint32_t i = 0; i < c.size(); ++i) {
      put(std::uint64_t{c[ReplicaId{i}].events});
      put(std::uint64_t{c[ReplicaId{i}].prefix});
    }
  }
  void put(const InRefPair& p) {
    put(p.source);
    put(p.ref);
  }
  void put(const OutRefEntry& e) {
    put(e.target.has_value());
    if (e.target) put(*e.target);
    put(e.ref.has_value());
    if (e.ref) put(*e.ref);
    put(e.write_dot);
  }
  void put(const LastRefs& l) { put_all(l.refs); }
  void put(const QueryKey& q) {
    put(q.target);
    put(q.last);
  }
  template <class K, class V>
  void put(const std::map<K, V>& m) {
    put(static_cast<std::uint64_t>(m.size()));
    for (const auto& [k, v] : m) {
      put(k);
      put(v);
    }
  }
  template <class C>
  void put_all(const C& c) {
    put(static_cast<std::uint64_t>(c.size()));
    for (const auto& x : c) put(x);
  }

  void put(const OutRef& o) {
    put_all(o.entries);
    put_all(o.context);
  }
  void put(const ObjectRecord& r) {
    put(r.key);
    put(r.label);
    put(r.root);
    put(r.deleted);
    put_all(r.inref.added);
    put_all(r.inref.removed);
    put(r.attrs);
    put(r.last_refs_at_delete);
  }
  void put(const StabilityQuery& q) {
    put(q.key);
    put(static_cast<std::uint64_t>(q.phase));
    put(q.collected);
    put(q.target);
    put(q.confirmed);
  }
  void put(const ConditionReport& r) {
    put(r.query);
    put(r.holds);
  }
  void put(const Effector& e) {
    put(static_cast<std::uint64_t>(e.index()));
    std::visit(overloaded{
                   [&](const fx::CreateObject& c) {
                     put(c.key);
                     put(c.label);
                     put(c.root);
                     put_all(c.attrs);
                     put(c.dot);
                   },
                   [&](const fx::InrefAdd& a) {
                     put(a.target);
                     put(a.pair);
                   },
                   [&](const fx::InrefRemove& r) {
                     put(r.target);
                     put(r.pair);
                   },
                   [&](const fx::OutrefSet& s) {
                     put(s.slot);
                     put_all(s.entries);
                     put(s.dot);
                     put_all(s.observed);
                   },
                   [&](const fx::MarkDeleted& m) {
                     put(m.object);
                     put(m.last);
                   },
               },
               e);
  }

 private:
  std::string& out_;
};

}  // namespace

void World::encode_event(std::string& out, const Event& e) {
  Encoder enc(out);
  enc.put(e.id);
  enc.put(e.deps);
  enc.put_all(e.chain);
}

const World::ReplicaKey& World::replica_key(std::uint32_t r) const {
  auto& cached = keys_.at(r);
  if (cached) return *cached;
  const Replica& rep = *replicas_.at(r);
  ReplicaKey key;
  Encoder objects(key.objects);
  objects.put(rep.objects);
  Encoder enc(key.rest);
  enc.put(rep.applied);
  enc.put(static_cast<std::uint64_t>(rep.buffer.size()));
  for (const MessageRef& m : rep.buffer) {
    enc.put(m.event);
    enc.put(std::uint64_t{m.chain_index});
  }
  enc.put_all(rep.stability.known);
  enc.put(rep.stability.own);
  for (std::uint32_t i = 0; i < rep.stability.frontier.replicas(); ++i) {
    enc.put(rep.stability.frontier.latest(ReplicaId{i}));
  }
  cached = std::make_shared<const ReplicaKey>(std::move(key));
  return *cached;
}

std::string World::objects_key() const {
  std::string out;
  Encoder enc(out);
  for (std::uint32_t r = 0; r < config_.replicas; ++r) {
    const std::string& k = replica_key(r).objects;
    enc.put(static_cast<std::uint64_t>(k.size()));
    out += k;
  }
  return out;
}

std::string World::state_key() const {
  std::string out;
  out.reserve(1024);
  Encoder enc(out);
  for (std::uint32_t r = 0; r < config_.replicas; ++r) {
    const ReplicaKey& k = replica_key(r);
    enc.put(static_cast<std::uint64_t>(k.objects.size()));
    out += k.objects;
    enc.put(static_cast<std::uint64_t>(k.rest.size()));
    out += k.rest;
  }
  for (const std::string& k : log_->keys) {
    enc.put(static_cast<std::uint64_t>(k.size()));
    out += k;
  }
  // Gossip ids depend on send order only; the per-sender queue order is
  // what delivery observes.
  enc.put(static_cast<std::uint64_t>(gossip_.size()));
  for (const GossipMessage& m : gossip_) {
    enc.put(m.from);
    enc.put(m.to);
    enc.put(m.sent_at);
    enc.put(static_cast<std::uint64_t>(m.body.index()));
    std::visit(overloaded{
                   [&](const QueryRegistration& r) { enc.put(r.query); },
                   [&](const ClockAnnouncement& a) {
                     enc.put(a.cut);
                     enc.put_all(a.reports);
                   },
               },
               m.body);
  }
  return out;
}

}  // namespace refcrdt
