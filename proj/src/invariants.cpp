#include "refcrdt/invariants.hpp"

#include <algorithm>
#include <set>

#include "refcrdt/detail/overloaded.hpp"

namespace refcrdt {

namespace {

constexpr std::array<std::string_view, kInvariantCount> kNames{
    "referential-integrity", "unique-ids",  "safe-deletion", "listing-well-formed",
    "convergence",           "exact-listing", "liveness",    "stability-refinement",
};
constexpr std::array<std::string_view, kInvariantCount> kTags{"I1", "I2", "I3", "I4",
                                                              "I5", "I6", "I7", "R"};

Violation make(Invariant which, std::optional<ReplicaId> r, std::string detail) {
  return Violation{which, 0, r, std::move(detail)};
}

/// Whether chain position `k` of event `e` lies inside `cut`.
bool in_cut(const World& w, const CausalCut& cut, EventId e, std::uint32_t k) {
  const ChainPosition& pos = cut[e.replica];
  if (e.seq <= pos.events) return true;
  const std::uint32_t msg = w.config().mode == CompositionMode::atomic ? 0 : k;
  return e.seq == pos.events + 1 && msg < pos.prefix;
}

template <class F>
void for_each_event(const World& w, F&& f) {
  for (std::uint32_t o = 0; o < w.replica_count(); ++o) {
    for (const Event& e : w.events(ReplicaId{o})) f(e);
  }
}

}  // namespace

std::string_view to_string(Invariant i) { return kNames.at(static_cast<std::size_t>(i)); }
std::string_view tag(Invariant i) { return kTags.at(static_cast<std::size_t>(i)); }

const Violation* InvariantReport::first(Invariant i) const {
  for (const auto& v : violations) {
    if (v.which == i) return &v;
  }
  return nullptr;
}

void InvariantReport::record(Violation v) {
  if (counts[static_cast<std::size_t>(v.which)]++ == 0) violations.push_back(std::move(v));
}

std::optional<Violation> check_referential_integrity(const World& w, ReplicaId r) {
  const ObjectStore& store = w.replica(r).objects;
  for (const auto& [key, obj] : store) {
    for (const auto& [name, out] : obj.attrs) {
      for (const auto& e : out.entries) {
        if (e.is_null()) continue;
        auto t = store.find(*e.target);
        const auto where = [&] { return to_string(key) + "." + name + " -> " + to_string(*e.target); };
        if (t == store.end()) return make(Invariant::referential_integrity, r, where() + " missing");
        if (t->second.deleted) {
          return make(Invariant::referential_integrity, r, where() + " is deleted");
        }
        const InRefPair p{key, *e.ref};
        if (!t->second.inref.added.contains(p) || t->second.inref.removed.contains(p)) {
          return make(Invariant::referential_integrity, r, where() + " not listed " + to_string(*e.ref));
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> check_listing_well_formed(const World& w, ReplicaId r) {
  for (const auto& [key, obj] : w.replica(r).objects) {
    if (!obj.inref.well_formed()) {
      return make(Invariant::listing_well_formed, r, to_string(key) + " removed before added");
    }
  }
  return std::nullopt;
}

std::optional<Violation> check_deleted_listings(const World& w, ReplicaId r) {
  const Replica& rep = w.replica(r);
  std::optional<Violation> out;
  for_each_event(w, [&](const Event& e) {
    if (out) return;
    const auto* d = std::get_if<fx::MarkDeleted>(&e.chain.back());
    if (!d || !e.deps.leq(rep.applied)) return;
    auto it = rep.objects.find(d->object);
    if (it == rep.objects.end()) return;
    for (const auto& p : it->second.inref.current()) {
      if (!d->last.contains(p.ref)) {
        out = make(Invariant::safe_deletion, r,
                   to_string(d->object) + " deleted by " + to_string(e.id) + " still lists " +
                       to_string(p.source) + to_string(p.ref));
        return;
      }
    }
  });
  return out;
}

std::optional<Violation> check_no_late_additions(const World& w) {
  std::optional<Violation> out;
  for_each_event(w, [&](const Event& del) {
    if (out) return;
    const auto* d = std::get_if<fx::MarkDeleted>(&del.chain.back());
    if (!d) return;
    for_each_event(w, [&](const Event& e) {
      if (out) return;
      for (std::uint32_t k = 0; k < e.chain.size(); ++k) {
        const auto* add = std::get_if<fx::InrefAdd>(&e.chain[k]);
        if (!add || add->target != d->object) continue;
        if (add->pair.source == d->object && d->last.contains(add->pair.ref)) continue;
        if (!in_cut(w, del.deps, e.id, k)) {
          out = make(Invariant::safe_deletion, std::nullopt,
                     to_string(e.id) + " adds " + to_string(add->pair.source) +
                         to_string(add->pair.ref) + " to " + to_string(d->object) +
                         " concurrently with or after its delete " + to_string(del.id));
          return;
        }
      }
    });
  });
  return out;
}

std::optional<Violation> check_unique_ids(const World& w) {
  std::set<RefId> listed;
  std::set<RefId> stored;
  std::optional<Violation> out;
  for_each_event(w, [&](const Event& e) {
    if (out) return;
    const RefId minted = ref_minted_by(e.id);
    for (const auto& fx : e.chain) {
      std::optional<RefId> intro;
      bool is_add = false;
      if (const auto* a = std::get_if<fx::InrefAdd>(&fx)) {
        intro = a->pair.ref;
        is_add = true;
      } else if (const auto* s = std::get_if<fx::OutrefSet>(&fx)) {
        for (const auto& entry : s->entries) {
          if (entry.ref) intro = entry.ref;
        }
      }
      if (!intro) continue;
      auto& seen = is_add ? listed : stored;
      if (*intro != minted || !seen.insert(*intro).second) {
        out = make(Invariant::unique_ids, std::nullopt,
                   to_string(*intro) + " reused or not minted by " + to_string(e.id));
        return;
      }
    }
  });
  return out;
}

std::optional<Violation> check_refinement(const World& w) {
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    const ReplicaId r{i};
    for (const auto& [key, q] : w.replica(r).stability.own) {
      if (q.phase == QueryPhase::stable && !oracle_stable(w, key)) {
        return make(Invariant::stability_refinement, r,
                    "stably_subset(" + to_string(key.target) + ") true but oracle false");
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> check_convergence(const World& w) {
  const ObjectStore& first = w.replica(ReplicaId{0}).objects;
  for (std::uint32_t i = 1; i < w.replica_count(); ++i) {
    if (w.replica(ReplicaId{i}).objects != first) {
      return make(Invariant::convergence, ReplicaId{i}, "object state differs from r0");
    }
  }
  return std::nullopt;
}

std::optional<Violation> check_exact_listing(const World& w) {
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    const ReplicaId r{i};
    const ObjectStore& store = w.replica(r).objects;
    std::map<ObjectKey, std::set<InRefPair>> expected;
    for (const auto& [key, obj] : store) {
      for (const auto& [name, out] : obj.attrs) {
        for (const auto& e : out.entries) {
          if (!e.is_null()) expected[*e.target].insert(InRefPair{key, *e.ref});
        }
      }
    }
    for (const auto& [key, obj] : store) {
      if (obj.inref.current() != expected[key]) {
        return make(Invariant::exact_listing, r,
                    "listing of " + to_string(key) + " differs from surviving entries");
      }
    }
  }
  return std::nullopt;
}

void InvariantMonitor::attach(World& w) {
  w.set_observer([this, &w](const Step& s) { after_step(w, s); });
}

void InvariantMonitor::after_step(const World& w, const Step& s) {
  const std::size_t index = step_++;
  auto note = [&](std::optional<Violation> v) {
    if (!v) return;
    v->step = index;
    report_.record(std::move(*v));
  };

  std::optional<ReplicaId> changed;
  std::visit(detail::overloaded{
                 [&](const GenerateStep& g) {
                   if (g.event) changed = g.replica;
                   if (g.event && std::holds_alternative<op::Delete>(g.op)) ++report_.deletes;
                 },
                 [&](const DeliverStep& d) { changed = d.replica; },
                 [&](const GossipStep&) {},
             },
             s);

  if (changed) {
    note(check_referential_integrity(w, *changed));
    note(check_listing_well_formed(w, *changed));
    note(check_deleted_listings(w, *changed));
    if (!report_.saw_multivalued) {
      for (const auto& [key, obj] : w.replica(*changed).objects) {
        for (const auto& [name, out] : obj.attrs) {
          report_.saw_multivalued = report_.saw_multivalued || out.entries.size() > 1;
        }
      }
    }
  }
  note(check_refinement(w));
}

void InvariantMonitor::check_quiescent(World& w) {
  w.quiesce();
  auto note = [&](std::optional<Violation> v) {
    if (!v) return;
    v->step = step_;
    report_.record(std::move(*v));
  };
  note(check_convergence(w));
  note(check_exact_listing(w));
  note(check_unique_ids(w));
  note(check_no_late_additions(w));
}

void InvariantMonitor::finish(World& w) {
  check_quiescent(w);
  run_liveness(w);
  run_collection(w);
  check_quiescent(w);
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    for (const auto& [key, q] : w.replica(ReplicaId{i}).stability.own) {
      report_.stable_queries += q.phase == QueryPhase::stable ? 1 : 0;
    }
  }
}

void InvariantMonitor::run_liveness(World& w) {
  // Unreferenced non-root objects, judged on the converged state.
  const ObjectStore& store = w.replica(ReplicaId{0}).objects;
  std::set<ObjectKey> targeted;
  for (const auto& [key, obj] : store) {
    for (const auto& [name, out] : obj.attrs) {
      for (const auto& e : out.entries) {
        if (!e.is_null()) targeted.insert(*e.target);
      }
    }
  }
  std::vector<ObjectKey> candidates;
  for (const auto& [key, obj] : store) {
    if (!obj.root && !targeted.contains(key)) candidates.push_back(key);
  }
  if (candidates.empty()) return;

  const LastRefs none;
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    for (ObjectKey t : candidates) w.generate(ReplicaId{i}, op::MayDelete{t, none});
  }
  w.quiesce();
  w.announce_round();
  w.announce_round();
  for (std::uint32_t i = 0; i < w.replica_count(); ++i) {
    for (ObjectKey t : candidates) {
      if (!stably_subset(w.replica(ReplicaId{i}).stability, QueryKey{t, none})) {
        report_.record(Violation{Invariant::liveness, step_, ReplicaId{i},
                                 to_string(t) + " unreferenced but not stably deletable"});
      }
    }
  }
}

void InvariantMonitor::run_collection(World& w) {
  constexpr int kCycles = 3;
  const ReplicaId collector{0};
  for (int cycle = 0; cycle < kCycles; ++cycle) {
    std::vector<ObjectKey> live;
    for (const auto& [key, obj] : w.replica(collector).objects) {
      if (!obj.root && !obj.deleted) live.push_back(key);
    }
    for (ObjectKey t : live) w.generate(collector, op::MayDelete{t, std::nullopt});
    w.quiesce();
    w.announce_round();
    w.announce_round();
    std::size_t deleted = 0;
    for (ObjectKey t : live) {
      const Outcome o = w.generate(collector, op::Delete{t, std::nullopt});
      deleted += std::holds_alternative<EventId>(o) ? 1 : 0;
    }
    w.quiesce();
    if (deleted == 0) break;
  }
}

}  // namespace refcrdt
