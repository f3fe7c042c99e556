#include "refcrdt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

#include "refcrdt/detail/overloaded.hpp"

namespace refcrdt {

namespace {

const std::vector<std::string> kAttrs{"f", "g"};

std::vector<Slot> slots_of(const ObjectStore& store, const std::vector<ObjectKey>& keys) {
  std::vector<Slot> out;
  for (ObjectKey k : keys) {
    for (const auto& [name, o] : store.at(k).attrs) out.push_back(Slot{k, name});
  }
  return out;
}

enum class Kind { create, init, assign, assign_null, invoke, may_delete, remove, announce };

Kind draw_kind(Rng& rng, const OpWeights& w) {
  const std::array<std::pair<Kind, std::uint32_t>, 8> table{{
      {Kind::create, w.create},
      {Kind::init, w.init},
      {Kind::assign, w.assign},
      {Kind::assign_null, w.assign_null},
      {Kind::invoke, w.invoke},
      {Kind::may_delete, w.may_delete},
      {Kind::remove, w.remove},
      {Kind::announce, w.announce},
  }};
  std::uint64_t x = rng.below(w.total());
  for (const auto& [kind, weight] : table) {
    if (x < weight) return kind;
    x -= weight;
  }
  return Kind::announce;
}

/// Draws an operation from what `replica` can see. Draws are mostly
/// plausible for an application but may still fail their preconditions.
Operation draw_operation(Rng& rng, const World& w, ReplicaId replica, const OpWeights& weights) {
  const Replica& rep = w.replica(replica);
  const ObjectStore& store = rep.objects;
  std::vector<ObjectKey> all, reachable, collectable, stable;
  for (const auto& [key, obj] : store) {
    all.push_back(key);
    if (accessible(store, key)) reachable.push_back(key);
    if (!obj.root) collectable.push_back(key);
  }
  for (const auto& [q, query] : rep.stability.own) {
    if (query.phase == QueryPhase::stable && store.contains(q.target) &&
        !store.at(q.target).deleted) {
      stable.push_back(q.target);
    }
  }
  const std::vector<Slot> reachable_slots = slots_of(store, reachable);
  const std::vector<Slot> all_slots = slots_of(store, all);

  auto create = [&]() -> Operation {
    op::CreateObject c;
    c.root = reachable.empty() || rng.chance(250);
    c.attrs = kAttrs;
    if (!c.root && !reachable_slots.empty() && rng.chance(800)) c.anchor = rng.pick(reachable_slots);
    return c;
  };

  switch (draw_kind(rng, weights)) {
    case Kind::create:
      return create();
    case Kind::init: {
      if (reachable_slots.empty()) return create();
      Slot source = rng.pick(reachable_slots);
      ObjectKey target = rng.chance(800) ? rng.pick(reachable) : rng.pick(all);
      return op::Init{source, target};
    }
    case Kind::assign:
      if (reachable_slots.empty()) return create();
      return op::Assign{rng.pick(reachable_slots), rng.pick(reachable_slots)};
    case Kind::assign_null:
      if (all_slots.empty()) return create();
      return op::AssignNull{rng.chance(900) && !reachable_slots.empty() ? rng.pick(reachable_slots)
                                                                         : rng.pick(all_slots)};
    case Kind::invoke:
      if (all_slots.empty()) return create();
      return op::Invoke{rng.pick(all_slots)};
    case Kind::may_delete:
      if (collectable.empty()) return op::Announce{};
      return op::MayDelete{rng.pick(collectable), std::nullopt};
    case Kind::remove:
      if (!stable.empty() && rng.chance(800)) return op::Delete{rng.pick(stable), std::nullopt};
      if (collectable.empty()) return op::Announce{};
      return op::Delete{rng.pick(collectable), std::nullopt};
    case Kind::announce:
      return op::Announce{};
  }
  return op::Announce{};
}

/// Brings `replica` up to the causal past of `parent` plus `prefix` of its
/// own chain messages.
void observe_parent(World& w, ReplicaId replica, const Event& parent, std::uint32_t prefix) {
  CausalCut target = parent.deps;
  const std::uint32_t count = w.message_count(parent);
  const ChainPosition pos = prefix >= count ? ChainPosition{parent.id.seq, 0}
                                            : ChainPosition{parent.id.seq - 1, prefix};
  target[parent.id.replica] = std::max(target[parent.id.replica], pos);
  w.catch_up(replica, target);
}

Trace build_execution(std::uint64_t seed, const TraceConfig& config, InvariantReport* report) {
  validate(config);
  World w(config.world());
  Trace trace{seed, config, {}};
  InvariantReport scratch;
  InvariantMonitor monitor(report ? *report : scratch);
  w.set_observer([&](const Step& s) {
    trace.steps.push_back(s);
    if (report) monitor.after_step(w, s);
  });

  Rng rng(seed);
  std::vector<EventId> generated;
  for (std::uint32_t i = 0; i < config.events; ++i) {
    const ReplicaId replica{static_cast<std::uint32_t>(rng.below(config.replicas))};
    if (rng.chance(config.settle_permille)) {
      w.quiesce();
      w.announce_round();
    }
    for (int parent = 0; parent < 2 && !generated.empty(); ++parent) {
      const Event& p = w.event(rng.pick(generated));
      const auto prefix = static_cast<std::uint32_t>(rng.below(w.message_count(p) + 1));
      observe_parent(w, replica, p, prefix);
    }
    for (std::uint64_t id : w.pending_gossip(replica)) {
      if (w.gossip_deliverable(replica, id) && rng.chance(500)) w.deliver_gossip(replica, id);
    }
    const Operation op = draw_operation(rng, w, replica, config.weights);
    const Outcome o = w.generate(replica, op);
    if (const auto* id = std::get_if<EventId>(&o)) generated.push_back(*id);
  }

  if (report) {
    report->trace_steps = trace.steps.size();
    w.set_observer([&](const Step& s) { monitor.after_step(w, s); });
    monitor.finish(w);
  }
  return trace;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Trace random_execution(std::uint64_t seed, const TraceConfig& config) {
  return build_execution(seed, config, nullptr);
}

Execution random_execution_checked(std::uint64_t seed, const TraceConfig& config) {
  Execution e;
  e.trace = build_execution(seed, config, &e.report);
  return e;
}

InvariantReport check_invariants(const Trace& trace) {
  InvariantReport report;
  World w(trace.config.world());
  InvariantMonitor monitor(report);
  monitor.attach(w);
  replay_into(w, trace);
  report.trace_steps = trace.steps.size();
  monitor.finish(w);
  return report;
}

bool convergence_check(const Trace& trace) {
  World w = replay(trace);
  w.quiesce();
  return !check_convergence(w).has_value();
}

Trace shrink(const Trace& failing, const FailurePredicate& still_fails) {
  if (!still_fails(failing)) throw NotFailing("trace does not fail");
  Trace best = failing;

  auto attempt = [&](std::size_t index) {
    Trace candidate = best;
    const Step removed = candidate.steps[index];
    candidate.steps.erase(candidate.steps.begin() + static_cast<std::ptrdiff_t>(index));
    if (const auto* g = std::get_if<GenerateStep>(&removed); g && g->event) {
      std::erase_if(candidate.steps, [&](const Step& s) {
        const auto* d = std::get_if<DeliverStep>(&s);
        return d && d->event == *g->event;
      });
    }
    Trace normalized = normalize(candidate);
    if (normalized.steps.size() >= best.steps.size()) return false;
    bool fails = false;
    try {
      fails = still_fails(normalized);
    } catch (const std::exception&) {
      fails = false;
    }
    if (fails) best = std::move(normalized);
    return fails;
  };

  bool progress = true;
  while (progress) {
    progress = false;
    // Events first, newest to oldest.
    for (std::size_t i = best.steps.size(); i-- > 0;) {
      if (i < best.steps.size() && std::holds_alternative<GenerateStep>(best.steps[i])) {
        progress = attempt(i) || progress;
      }
    }
    for (std::size_t i = best.steps.size(); i-- > 0;) {
      if (i < best.steps.size() && !std::holds_alternative<GenerateStep>(best.steps[i])) {
        progress = attempt(i) || progress;
      }
    }
  }
  return best;
}

Trace shrink(const Trace& failing) {
  const InvariantReport report = check_invariants(failing);
  if (report.ok()) throw NotFailing("trace satisfies every invariant");
  const Invariant which = report.violations.front().which;
  return shrink(failing, [which](const Trace& t) { return !check_invariants(t).passed(which); });
}

CampaignSummary run_campaign(const CampaignOptions& options) {
  validate(options.config);
  struct Result {
    InvariantReport report;
    std::uint64_t seed = 0;
  };
  std::vector<Result> results(options.executions);
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::uint64_t i = next++; i < options.executions; i = next++) {
      try {
        const std::uint64_t seed = derive_seed(options.seed, i);
        results[i].seed = seed;
        results[i].report = random_execution_checked(seed, options.config).report;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  CampaignSummary s;
  s.executions = options.executions;
  for (std::uint64_t i = 0; i < options.executions; ++i) {
    const InvariantReport& r = results[i].report;
    for (std::size_t k = 0; k < kInvariantCount; ++k) s.violating_executions[k] += r.counts[k] ? 1 : 0;
    s.multivalued_executions += r.saw_multivalued ? 1 : 0;
    s.deletes += r.deletes;
    s.stable_queries += r.stable_queries;
    if (r.ok()) continue;
    ++s.failing_executions;
    if (s.failures.size() >= options.keep_failures) continue;
    Trace trace = random_execution(results[i].seed, options.config);
    if (options.shrink_failures) trace = shrink(trace);
    s.failures.push_back(CampaignFailure{i, results[i].seed, r.violations.front(), std::move(trace)});
  }
  return s;
}

}  // namespace refcrdt
