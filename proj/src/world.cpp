#include "refcrdt/world.hpp"

#include <algorithm>

#include "refcrdt/codec.hpp"
#include "refcrdt/detail/overloaded.hpp"

namespace refcrdt {

using detail::overloaded;

std::string_view to_string(CompositionMode m) {
  return m == CompositionMode::atomic ? "atomic" : "pure-causal";
}

std::optional<CompositionMode> mode_from_string(std::string_view s) {
  if (s == "atomic") return CompositionMode::atomic;
  if (s == "pure-causal") return CompositionMode::pure_causal;
  return std::nullopt;
}

std::string_view to_string(Fault f) {
  switch (f) {
    case Fault::none: return "none";
    case Fault::outref_before_inref: return "outref-before-inref";
    case Fault::skip_stability: return "skip-stability";
  }
  return "none";
}

std::optional<Fault> fault_from_string(std::string_view s) {
  for (Fault f : {Fault::none, Fault::outref_before_inref, Fault::skip_stability}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

World::World(WorldConfig config)
    : config_(config), log_(std::make_shared<EventLog>(EventLog{std::vector<std::vector<Event>>(config.replicas),
                                                      std::vector<std::string>(config.replicas)})),
      keys_(config.replicas) {
  replicas_.reserve(config.replicas);
  for (std::uint32_t i = 0; i < config.replicas; ++i) {
    auto r = std::make_shared<Replica>();
    r->id = ReplicaId{i};
    r->applied = CausalCut(config.replicas);
    r->stability.frontier = StableFrontier(config.replicas);
    replicas_.push_back(std::move(r));
  }
}

Replica& World::mutable_replica(ReplicaId r) {
  auto& p = replicas_.at(r.value);
  if (p.use_count() > 1) p = std::make_shared<Replica>(*p);
  keys_.at(r.value).reset();
  return *p;
}

World::EventLog& World::mutable_log() {
  if (log_.use_count() > 1) log_ = std::make_shared<EventLog>(*log_);
  return *log_;
}

const Event& World::event(EventId id) const {
  return log_->events.at(id.replica.value).at(id.seq - 1);
}

bool World::has_event(EventId id) const {
  const auto& events = log_->events;
  return id.replica.value < events.size() && id.seq >= 1 && id.seq <= events[id.replica.value].size();
}

std::uint32_t World::message_count(const Event& e) const {
  return config_.mode == CompositionMode::atomic ? 1u
                                                 : static_cast<std::uint32_t>(e.chain.size());
}

Outcome World::generate(ReplicaId replica, const Operation& op) {
  Replica& rep = mutable_replica(replica);
  GenerateStep step{replica, op, {}, std::nullopt, std::nullopt, {}};

  Outcome outcome = std::visit(
      overloaded{
          [&](const op::Invoke& i) -> Outcome {
            auto r = invoke_target(rep.objects, i.slot);
            if (auto* f = std::get_if<Failure>(&r)) return *f;
            return std::get<ObjectKey>(r);
          },
          [&](const op::MayDelete& m) -> Outcome {
            if (!rep.objects.contains(m.target)) return Failure::UnknownObject;
            QueryKey q{m.target, resolve_last(rep.objects, m.target, m.last)};
            if (stably_subset(rep.stability, q)) return true;
            if (!rep.stability.own.contains(q)) {
              rep.stability.own.emplace(q, StabilityQuery{q, QueryPhase::collecting, {}, {}, {}});
              rep.stability.known.insert(q);
              broadcast(replica, QueryRegistration{replica, q});
            }
            return false;
          },
          [&](const op::Announce&) -> Outcome {
            auto a = make_announcement(replica, rep.objects, rep.applied, rep.stability);
            receive_announcement(rep.stability, a, config_.replicas);
            broadcast(replica, std::move(a));
            return std::monostate{};
          },
          [&](const auto&) -> Outcome {
            const EventId id{replica, static_cast<std::uint32_t>(events(replica).size() + 1)};
            auto stably = [&](ObjectKey t, const LastRefs& last) {
              return stably_subset(rep.stability, QueryKey{t, last});
            };
            auto built = build_chain(rep.objects, id, op, stably, config_.fault);
            if (auto* f = std::get_if<Failure>(&built)) return *f;
            Event ev{id, op, rep.applied, std::move(std::get<Chain>(built))};
            for (const auto& fx : ev.chain) apply_effector(rep.objects, fx);
            rep.applied[replica] = ChainPosition{id.seq, 0};
            step.event = id;
            step.deps = ev.deps;
            for (const auto& fx : ev.chain) step.chain.push_back(summarize(fx));
            EventLog& log = mutable_log();
            encode_event(log.keys[replica.value], ev);
            log.events[replica.value].push_back(std::move(ev));
            return id;
          },
      },
      op);

  step.outcome = outcome_string(outcome);
  notify(step);
  if (step.event) drain_buffer(rep);
  return outcome;
}

bool World::applied(ReplicaId replica, MessageRef msg) const {
  const ChainPosition& pos = this->replica(replica).applied[msg.event.replica];
  if (msg.event.seq <= pos.events) return true;
  return msg.event.seq == pos.events + 1 && msg.chain_index < pos.prefix;
}

bool World::deliverable(ReplicaId replica, MessageRef msg) const {
  if (!has_event(msg.event)) return false;
  const Replica& rep = this->replica(replica);
  const ChainPosition& pos = rep.applied[msg.event.replica];
  if (msg.event.seq != pos.events + 1 || msg.chain_index != pos.prefix) return false;
  const Event& e = event(msg.event);
  return msg.chain_index < message_count(e) && e.deps.leq(rep.applied);
}

DeliveryStatus World::deliver(ReplicaId replica, MessageRef msg) {
  if (applied(replica, msg)) {
    throw DuplicateDelivery("message " + to_string(msg.event) + "/" +
                            std::to_string(msg.chain_index) + " already applied at " +
                            to_string(replica));
  }
  Replica& rep = mutable_replica(replica);
  if (!deliverable(replica, msg)) {
    if (std::find(rep.buffer.begin(), rep.buffer.end(), msg) == rep.buffer.end()) {
      rep.buffer.push_back(msg);
    }
    return DeliveryStatus::buffered;
  }
  apply_message(rep, msg);
  drain_buffer(rep);
  return DeliveryStatus::applied;
}

void World::apply_message(Replica& rep, MessageRef msg) {
  const Event& e = event(msg.event);
  ChainPosition& pos = rep.applied[msg.event.replica];
  if (config_.mode == CompositionMode::atomic) {
    for (const auto& fx : e.chain) apply_effector(rep.objects, fx);
    pos = ChainPosition{msg.event.seq, 0};
  } else {
    apply_effector(rep.objects, e.chain.at(msg.chain_index));
    if (++pos.prefix == e.chain.size()) pos = ChainPosition{msg.event.seq, 0};
  }
  notify(DeliverStep{rep.id, msg.event, msg.chain_index});
}

void World::drain_buffer(Replica& rep) {
  bool progress = true;
  while (progress && !rep.buffer.empty()) {
    progress = false;
    for (auto it = rep.buffer.begin(); it != rep.buffer.end(); ++it) {
      if (applied(rep.id, *it)) {
        rep.buffer.erase(it);
        progress = true;
        break;
      }
      if (deliverable(rep.id, *it)) {
        MessageRef msg = *it;
        rep.buffer.erase(it);
        apply_message(rep, msg);
        progress = true;
        break;
      }
    }
  }
}

std::optional<MessageRef> World::next_message(ReplicaId replica, ReplicaId origin) const {
  const ChainPosition& pos = this->replica(replica).applied[origin];
  if (pos.events >= events(origin).size()) return std::nullopt;
  return MessageRef{EventId{origin, pos.events + 1}, pos.prefix};
}

void World::broadcast(ReplicaId from,
                      const std::variant<QueryRegistration, ClockAnnouncement>& body) {
  for (std::uint32_t to = 0; to < config_.replicas; ++to) {
    if (to == from.value) continue;
    gossip_.push_back(GossipMessage{next_gossip_++, from, ReplicaId{to}, replica(from).applied, body});
  }
}

std::vector<std::uint64_t> World::pending_gossip(ReplicaId replica) const {
  std::vector<std::uint64_t> out;
  for (const auto& m : gossip_) {
    if (m.to == replica) out.push_back(m.id);
  }
  return out;
}

bool World::gossip_deliverable(ReplicaId replica, std::uint64_t id) const {
  auto it = std::find_if(gossip_.begin(), gossip_.end(),
                         [&](const GossipMessage& g) { return g.id == id; });
  if (it == gossip_.end() || it->to != replica) return false;
  // FIFO per sender.
  for (const auto& m : gossip_) {
    if (m.to == replica && m.from == it->from && m.id < id) return false;
  }
  return it->sent_at.leq(this->replica(replica).applied);
}

bool World::deliver_gossip(ReplicaId replica, std::uint64_t id) {
  if (!gossip_deliverable(replica, id)) return false;
  auto it = std::find_if(gossip_.begin(), gossip_.end(),
                         [&](const GossipMessage& g) { return g.id == id; });
  GossipMessage m = std::move(*it);
  gossip_.erase(it);
  receive_gossip(mutable_replica(replica), m);
  notify(GossipStep{replica, id});
  return true;
}

void World::receive_gossip(Replica& r, const GossipMessage& m) {
  std::visit(overloaded{
                 [&](const QueryRegistration& reg) { r.stability.known.insert(reg.query); },
                 [&](const ClockAnnouncement& a) {
                   receive_announcement(r.stability, a, config_.replicas);
                 },
             },
             m.body);
}

void World::quiesce() {
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::uint32_t r = 0; r < config_.replicas; ++r) {
      const ReplicaId rid{r};
      for (std::uint32_t o = 0; o < config_.replicas; ++o) {
        while (auto next = next_message(rid, ReplicaId{o})) {
          if (!deliverable(rid, *next)) break;
          deliver(rid, *next);
          progress = true;
        }
      }
    }
    for (std::uint32_t r = 0; r < config_.replicas; ++r) {
      for (std::uint64_t id : pending_gossip(ReplicaId{r})) {
        progress = deliver_gossip(ReplicaId{r}, id) || progress;
      }
    }
  }
  if (!quiescent()) throw Stuck("quiesce: outstanding messages are never deliverable");
}

bool World::quiescent() const {
  if (!gossip_.empty()) return false;
  for (std::uint32_t r = 0; r < config_.replicas; ++r) {
    for (std::uint32_t o = 0; o < config_.replicas; ++o) {
      if (next_message(ReplicaId{r}, ReplicaId{o})) return false;
    }
  }
  return true;
}

void World::catch_up(ReplicaId replica, const CausalCut& target) {
  const auto applied = [&]() -> const CausalCut& { return this->replica(replica).applied; };
  while (!target.leq(applied())) {
    bool progress = false;
    for (std::uint32_t o = 0; o < config_.replicas; ++o) {
      const ReplicaId origin{o};
      while (applied()[origin] < target[origin]) {
        auto next = next_message(replica, origin);
        if (!next || !deliverable(replica, *next)) break;
        deliver(replica, *next);
        progress = true;
      }
    }
    if (!progress) throw Stuck("catch_up: target cut is not causally closed");
  }
}

void World::announce_round() {
  for (std::uint32_t r = 0; r < config_.replicas; ++r) generate(ReplicaId{r}, op::Announce{});
  quiesce();
}

void World::notify(const Step& s) {
  if (observer_) observer_(s);
}

std::string World::serialize_state(bool full) const {
  nlohmann::json j;
  j["mode"] = std::string(to_string(config_.mode));
  auto& reps = j["replicas"] = nlohmann::json::array();
  for (const auto& shared : replicas_) {
    const Replica& rep = *shared;
    nlohmann::json r;
    r["id"] = rep.id.value;
    r["objects"] = rep.objects;
    if (full) {
      r["applied"] = rep.applied;
      r["stability"] = rep.stability;
      auto& buf = r["buffer"] = nlohmann::json::array();
      for (const auto& m : rep.buffer) buf.push_back({m.event, m.chain_index});
    }
    reps.push_back(std::move(r));
  }
  if (full) {
    auto& ev = j["events"] = nlohmann::json::array();
    for (const auto& per : log_->events) {
      for (const auto& e : per) {
        nlohmann::json je;
        je["id"] = e.id;
        je["op"] = encode(e.op);
        je["deps"] = e.deps;
        auto& chain = je["chain"] = nlohmann::json::array();
        for (const auto& fx : e.chain) chain.push_back(summarize(fx));
        ev.push_back(std::move(je));
      }
    }
    auto& g = j["gossip"] = nlohmann::json::array();
    for (const auto& m : gossip_) {
      nlohmann::json body;
      std::visit([&](const auto& b) { body = b; }, m.body);
      g.push_back({m.id, m.from.value, m.to.value, m.sent_at, body});
    }
  }
  return j.dump();
}

}  // namespace refcrdt
