#include "refcrdt/explorer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>


namespace refcrdt {

namespace {

struct Hash128 {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool operator==(const Hash128&) const = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const { return h.a ^ (h.b * 0x9e3779b97f4a7c15ULL); }
};

Hash128 hash128(std::string_view s) {
  std::uint64_t fnv = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    fnv ^= c;
    fnv *= 0x100000001b3ULL;
  }
  return {fnv, std::hash<std::string_view>{}(s)};
}

using HashSet = std::unordered_set<Hash128, Hash128Hasher>;

struct Node {
  World world;
  std::vector<std::size_t> next;        // per replica, into its event list
  std::vector<std::uint32_t> announced;  // per replica
  std::vector<std::string> outcomes;     // per program event
  std::vector<QueryKey> settled;         // queries oracle_stable in the parent state
};

class Explorer {
 public:
  Explorer(const Program& program, const ExploreOptions& options, ExploreReport& report,
           HashSet* projections)
      : program_(program), options_(options), report_(report), projections_(projections),
        by_replica_(program.replicas) {
    for (std::size_t i = 0; i < program.events.size(); ++i) {
      by_replica_.at(program.events[i].replica.value).push_back(i);
    }
  }

  std::size_t run(CompositionMode mode) {
    Node root{World(WorldConfig{program_.replicas, mode, Fault::none}),
              std::vector<std::size_t>(program_.replicas, 0),
              std::vector<std::uint32_t>(program_.replicas, 0),
              std::vector<std::string>(program_.events.size()),
              {}};
    for (const ProgramEvent& e : program_.setup) {
      const Outcome o = root.world.generate(e.replica, e.op);
      if (std::holds_alternative<Failure>(o)) {
        throw std::logic_error("setup of " + program_.name + " failed: " + describe(e.op) + " -> " +
                               outcome_string(o));
      }
    }
    root.world.quiesce();
    if (!program_.interleave_generation) {
      for (std::uint32_t r = 0; r < program_.replicas; ++r) {
        while (root.next[r] < by_replica_[r].size()) generate(root, ReplicaId{r});
      }
    }
    visit(std::move(root));
    return seen_.size();
  }

 private:
  void generate(Node& n, ReplicaId r) {
    const std::size_t index = by_replica_[r.value][n.next[r.value]++];
    n.outcomes[index] = outcome_string(n.world.generate(r, program_.events[index].op));
  }

  std::string key(const Node& n) const {
    std::string k = n.world.state_key();
    for (auto x : n.next) k += "|" + std::to_string(x);
    for (auto x : n.announced) k += "|" + std::to_string(x);
    for (const auto& o : n.outcomes) k += "|" + o;
    return k;
  }

  void visit(Node n) {
    // Once no replica can ever list a target again, no step may change
    // that. Checked on every edge, including those into known states.
    for (const QueryKey& q : n.settled) {
      if (!oracle_stable(n.world, q)) {
        report_.invariants.record(Violation{Invariant::stability_refinement, report_.states, std::nullopt,
                                            "oracle_stable(" + to_string(q.target) + ") became false again"});
      }
    }
    if (!seen_.insert(hash128(key(n))).second) return;
    if (projections_) projections_->insert(hash128(n.world.objects_key()));
    check(n);

    const std::uint32_t replicas = program_.replicas;
    for (std::uint32_t r = 0; r < replicas; ++r) {
      const ReplicaId rid{r};
      if (program_.interleave_generation && n.next[r] < by_replica_[r].size()) {
        Node child = n;
        generate(child, rid);
        visit(std::move(child));
      }
      // Announcing only matters once the replica has a query to report on.
      if (n.announced[r] < program_.announce_budget && !n.world.replica(rid).stability.known.empty()) {
        Node child = n;
        ++child.announced[r];
        child.world.generate(rid, op::Announce{});
        visit(std::move(child));
      }
      for (std::uint32_t o = 0; o < replicas; ++o) {
        if (o == r) continue;
        auto msg = n.world.next_message(rid, ReplicaId{o});
        if (!msg || !n.world.deliverable(rid, *msg)) continue;
        Node child = n;
        child.world.deliver(rid, *msg);
        visit(std::move(child));
      }
      for (std::uint64_t id : n.world.pending_gossip(rid)) {
        if (!n.world.gossip_deliverable(rid, id)) continue;
        Node child = n;
        child.world.deliver_gossip(rid, id);
        visit(std::move(child));
      }
    }
  }

  void check(Node& n) {
    const std::size_t index = report_.states++;
    InvariantReport& inv = report_.invariants;
    auto note = [&](std::optional<Violation> v) {
      if (!v) return;
      v->step = index;
      inv.record(*v);
    };
    const World& w = n.world;
    for (std::uint32_t r = 0; r < program_.replicas; ++r) {
      const ReplicaId rid{r};
      note(check_referential_integrity(w, rid));
      note(check_listing_well_formed(w, rid));
      note(check_deleted_listings(w, rid));
      for (const auto& [key, obj] : w.replica(rid).objects) {
        for (const auto& [name, out] : obj.attrs) {
          if (out.entries.size() > 1) inv.saw_multivalued = true;
        }
      }
    }
    note(check_refinement(w));

    n.settled.clear();
    std::set<QueryKey> queries;
    for (std::uint32_t r = 0; r < program_.replicas; ++r) {
      const auto& known = w.replica(ReplicaId{r}).stability.known;
      queries.insert(known.begin(), known.end());
    }
    for (const QueryKey& q : queries) {
      if (oracle_stable(w, q)) n.settled.push_back(q);
    }

    if (options_.state_check) {
      if (auto failure = options_.state_check(w)) {
        if (!report_.first_state_failure) report_.first_state_failure = *failure;
        ++report_.state_failures;
      }
    }

    bool done = w.quiescent();
    for (std::uint32_t r = 0; r < program_.replicas; ++r) done = done && n.next[r] == by_replica_[r].size();
    if (!done) return;
    ++report_.terminals;
    note(check_unique_ids(w));
    note(check_no_late_additions(w));
    note(check_convergence(w));
    note(check_exact_listing(w));
    if (options_.terminal_check) {
      if (auto failure = options_.terminal_check(w, n.outcomes)) {
        if (!report_.first_terminal_failure) report_.first_terminal_failure = *failure;
        ++report_.terminal_failures;
      }
    }
  }

  const Program& program_;
  const ExploreOptions& options_;
  ExploreReport& report_;
  HashSet* projections_;
  std::vector<std::vector<std::size_t>> by_replica_;
  HashSet seen_;
};

}  // namespace

void ExploreReport::merge(const ExploreReport& other) {
  for (const Violation& v : other.invariants.violations) {
    if (invariants.passed(v.which)) invariants.violations.push_back(v);
  }
  for (std::size_t i = 0; i < kInvariantCount; ++i) invariants.counts[i] += other.invariants.counts[i];
  invariants.saw_multivalued = invariants.saw_multivalued || other.invariants.saw_multivalued;
  states += other.states;
  terminals += other.terminals;
  atomic_states += other.atomic_states;
  atomic_unreachable += other.atomic_unreachable;
  terminal_failures += other.terminal_failures;
  if (!first_terminal_failure) first_terminal_failure = other.first_terminal_failure;
  state_failures += other.state_failures;
  if (!first_state_failure) first_state_failure = other.first_state_failure;
  if (!first_atomic_unreachable) first_atomic_unreachable = other.first_atomic_unreachable;
}

ExploreReport exhaustive_explore(const Program& program, const ExploreOptions& options) {
  if (program.events.size() > options.bound) {
    throw BoundExceeded(program.name + " has " + std::to_string(program.events.size()) +
                        " events, bound is " + std::to_string(options.bound));
  }
  for (const ProgramEvent& e : program.events) {
    if (e.replica.value >= program.replicas) throw std::invalid_argument("event replica out of range");
  }
  ExploreReport report;
  const bool refine = options.check_atomic_refinement && options.mode == CompositionMode::pure_causal;
  HashSet causal;
  Explorer(program, options, report, refine ? &causal : nullptr).run(options.mode);
  if (!refine) return report;

  // Atomic states are checked like any other, then looked up.
  ExploreReport atomic;
  HashSet atomic_projections;
  Explorer(program, options, atomic, &atomic_projections).run(CompositionMode::atomic);
  report.merge(atomic);
  report.atomic_states = atomic.states;
  report.states -= atomic.states;
  report.terminals -= atomic.terminals;
  for (const Hash128& h : atomic_projections) {
    if (causal.contains(h)) continue;
    ++report.atomic_unreachable;
    if (!report.first_atomic_unreachable) {
      report.first_atomic_unreachable = program.name + ": atomic object state not reachable in pure-causal mode";
    }
  }
  return report;
}

std::vector<ProgramEvent> catalog_setup() {
  const ReplicaId r0{0};
  const ObjectKey a{0, 1};
  return {
      {r0, op::CreateObject{true, {"a"}, "A", std::nullopt, std::nullopt}},
      {r0, op::CreateObject{true, {"b"}, "B", std::nullopt, std::nullopt}},
      {r0, op::CreateObject{false, {"x"}, "X", std::nullopt, Slot{a, "a"}}},
  };
}

std::vector<Operation> catalog_operations() {
  const ObjectKey a{0, 1}, b{0, 2}, x{0, 3};
  return {
      op::Assign{Slot{b, "b"}, Slot{a, "a"}},
      op::AssignNull{Slot{a, "a"}},
      op::MayDelete{x, std::nullopt},
      op::Delete{x, std::nullopt},
  };
}

std::vector<Program> catalog_programs(std::size_t max_events) {
  const std::vector<Operation> ops = catalog_operations();
  const std::vector<ProgramEvent> setup = catalog_setup();
  std::vector<Program> out;

  // All op sequences of each length, then split by replica.
  std::vector<std::vector<std::vector<std::size_t>>> sequences(max_events + 1);
  sequences[0].push_back({});
  for (std::size_t len = 1; len <= max_events; ++len) {
    for (const auto& prefix : sequences[len - 1]) {
      for (std::size_t k = 0; k < ops.size(); ++k) {
        auto s = prefix;
        s.push_back(k);
        sequences[len].push_back(std::move(s));
      }
    }
  }
  for (std::size_t total = 1; total <= max_events; ++total) {
    for (std::size_t n0 = 0; n0 <= total; ++n0) {
      for (const auto& s0 : sequences[n0]) {
        for (const auto& s1 : sequences[total - n0]) {
          Program p;
          p.name = "catalog r0[";
          for (auto k : s0) p.name += std::string(op_name(ops[k])) + ";";
          p.name += "] r1[";
          for (auto k : s1) p.name += std::string(op_name(ops[k])) + ";";
          p.name += "]";
          p.replicas = 2;
          p.setup = setup;
          for (auto k : s0) p.events.push_back({ReplicaId{0}, ops[k]});
          for (auto k : s1) p.events.push_back({ReplicaId{1}, ops[k]});
          p.interleave_generation = true;
          const bool queries = std::any_of(p.events.begin(), p.events.end(), [](const ProgramEvent& e) {
            return std::holds_alternative<op::MayDelete>(e.op);
          });
          p.announce_budget = queries ? 2 : 0;
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

ExploreReport explore_catalog(std::size_t max_events, const ExploreOptions& options,
                              std::size_t* programs) {
  ExploreReport total;
  const auto all = catalog_programs(max_events);
  for (const Program& p : all) total.merge(exhaustive_explore(p, options));
  if (programs) *programs = all.size();
  return total;
}

}  // namespace refcrdt
