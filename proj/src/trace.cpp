#include "refcrdt/trace.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "refcrdt/codec.hpp"
#include "refcrdt/detail/overloaded.hpp"

namespace refcrdt {

using detail::overloaded;

namespace {

json weights_json(const OpWeights& w) {
  return json{{"create", w.create},         {"init", w.init},
              {"assign", w.assign},         {"assign_null", w.assign_null},
              {"invoke", w.invoke},         {"may_delete", w.may_delete},
              {"delete", w.remove},         {"announce", w.announce}};
}

OpWeights weights_from(const json& j) {
  OpWeights w;
  w.create = j.at("create");
  w.init = j.at("init");
  w.assign = j.at("assign");
  w.assign_null = j.at("assign_null");
  w.invoke = j.at("invoke");
  w.may_delete = j.at("may_delete");
  w.remove = j.at("delete");
  w.announce = j.at("announce");
  return w;
}

json step_json(const Step& s, std::size_t index) {
  return std::visit(
      overloaded{
          [&](const GenerateStep& g) {
            json j{{"type", "event"},      {"step", index},         {"replica", g.replica},
                   {"op", encode(g.op)},   {"outcome", g.outcome}};
            if (g.event) {
              j["id"] = *g.event;
              j["deps"] = *g.deps;
              j["chain"] = g.chain;
            }
            return j;
          },
          [&](const DeliverStep& d) {
            return json{{"type", "deliver"},   {"step", index},
                        {"replica", d.replica}, {"event", d.event},
                        {"chain_index", d.chain_index}};
          },
          [&](const GossipStep& g) {
            return json{{"type", "gossip"}, {"step", index}, {"replica", g.replica},
                        {"gossip", g.gossip}};
          },
      },
      s);
}

Step step_from(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "event") {
    GenerateStep g{j.at("replica").get<ReplicaId>(), decode_operation(j.at("op")),
                   j.at("outcome").get<std::string>(), std::nullopt, std::nullopt, {}};
    if (j.contains("id")) {
      g.event = j.at("id").get<EventId>();
      g.deps = j.at("deps").get<CausalCut>();
      g.chain = j.at("chain").get<std::vector<std::string>>();
    }
    return g;
  }
  if (type == "deliver") {
    return DeliverStep{j.at("replica").get<ReplicaId>(), j.at("event").get<EventId>(),
                       j.at("chain_index").get<std::uint32_t>()};
  }
  if (type == "gossip") {
    return GossipStep{j.at("replica").get<ReplicaId>(), j.at("gossip").get<std::uint64_t>()};
  }
  throw TraceFormatError("unknown record type '" + type + "'");
}

void check_replica(const World& w, ReplicaId r) {
  if (r.value >= w.replica_count()) {
    throw ReplayMismatch("replica " + to_string(r) + " out of range");
  }
}

}  // namespace

std::size_t Trace::generate_count() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += std::holds_alternative<GenerateStep>(s) ? 1 : 0;
  return n;
}

void validate(const TraceConfig& c) {
  if (c.replicas < 1) throw ConfigInvalid("at least one replica is required");
  if (c.events < 1) throw ConfigInvalid("at least one event is required");
  if (c.weights.total() == 0) throw ConfigInvalid("operation weights are all zero");
  if (c.settle_permille > 1000) throw ConfigInvalid("settle_permille exceeds 1000");
}

std::string serialize(const Trace& t) {
  std::ostringstream out;
  json header{{"type", "header"},
              {"format", "refcrdt-trace"},
              {"version", kTraceFormatVersion},
              {"seed", t.seed},
              {"config",
               {{"replicas", t.config.replicas},
                {"events", t.config.events},
                {"mode", to_string(t.config.mode)},
                {"weights", weights_json(t.config.weights)},
                {"settle_permille", t.config.settle_permille},
                {"fault", to_string(t.config.fault)}}}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    if (std::holds_alternative<GenerateStep>(t.steps[i])) out << step_json(t.steps[i], i).dump() << '\n';
  }
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    if (!std::holds_alternative<GenerateStep>(t.steps[i])) out << step_json(t.steps[i], i).dump() << '\n';
  }
  return out.str();
}

Trace parse_trace(std::string_view text) {
  Trace t;
  std::map<std::size_t, Step> by_index;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.at("type") != "header" || j.at("format") != "refcrdt-trace") {
          throw TraceFormatError("missing trace header");
        }
        if (j.at("version").get<int>() != kTraceFormatVersion) {
          throw TraceFormatError("unsupported trace version " + j.at("version").dump());
        }
        t.seed = j.at("seed").get<std::uint64_t>();
        const json& c = j.at("config");
        t.config.replicas = c.at("replicas");
        t.config.events = c.at("events");
        auto mode = mode_from_string(c.at("mode").get<std::string>());
        auto fault = fault_from_string(c.at("fault").get<std::string>());
        if (!mode || !fault) throw TraceFormatError("bad mode or fault in header");
        t.config.mode = *mode;
        t.config.fault = *fault;
        t.config.weights = weights_from(c.at("weights"));
        t.config.settle_permille = c.at("settle_permille");
        have_header = true;
        continue;
      }
      const std::size_t index = j.at("step").get<std::size_t>();
      if (!by_index.emplace(index, step_from(j)).second) {
        throw TraceFormatError("duplicate step index " + std::to_string(index));
      }
    } catch (const TraceFormatError& e) {
      throw TraceFormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw TraceFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw TraceFormatError("empty trace");
  std::size_t expect = 0;
  for (auto& [index, step] : by_index) {
    if (index != expect++) throw TraceFormatError("step indices are not contiguous");
    t.steps.push_back(std::move(step));
  }
  return t;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

void write_trace_file(const std::string& path, const Trace& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize(t);
}

void replay_into(World& w, const Trace& t, std::size_t limit) {
  const std::size_t n = std::min(limit, t.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string at = "step " + std::to_string(i) + ": ";
    std::visit(overloaded{
                   [&](const GenerateStep& g) {
                     check_replica(w, g.replica);
                     const Outcome o = w.generate(g.replica, g.op);
                     if (outcome_string(o) != g.outcome) {
                       throw ReplayMismatch(at + "outcome " + outcome_string(o) +
                                            " but trace says " + g.outcome);
                     }
                   },
                   [&](const DeliverStep& d) {
                     check_replica(w, d.replica);
                     const MessageRef m{d.event, d.chain_index};
                     if (!w.deliverable(d.replica, m)) {
                       throw ReplayMismatch(at + "message not deliverable");
                     }
                     w.deliver(d.replica, m);
                   },
                   [&](const GossipStep& g) {
                     check_replica(w, g.replica);
                     if (!w.deliver_gossip(g.replica, g.gossip)) {
                       throw ReplayMismatch(at + "gossip not deliverable");
                     }
                   },
               },
               t.steps[i]);
  }
}

World replay(const Trace& t) {
  World w(t.config.world());
  replay_into(w, t);
  return w;
}

Trace normalize(const Trace& t) {
  Trace out{t.seed, t.config, {}};
  World w(t.config.world());
  w.set_observer([&](const Step& s) { out.steps.push_back(s); });
  // Gossip ids shift when announcing steps are removed; fall back to the
  // oldest deliverable message for the same receiver.
  for (const auto& s : t.steps) {
    std::visit(overloaded{
                   [&](const GenerateStep& g) {
                     if (g.replica.value < w.replica_count()) w.generate(g.replica, g.op);
                   },
                   [&](const DeliverStep& d) {
                     if (d.replica.value >= w.replica_count()) return;
                     const MessageRef m{d.event, d.chain_index};
                     if (w.deliverable(d.replica, m)) w.deliver(d.replica, m);
                   },
                   [&](const GossipStep& g) {
                     if (g.replica.value >= w.replica_count()) return;
                     if (w.deliver_gossip(g.replica, g.gossip)) return;
                     for (std::uint64_t id : w.pending_gossip(g.replica)) {
                       if (w.deliver_gossip(g.replica, id)) return;
                     }
                   },
               },
               s);
  }
  return out;
}

}  // namespace refcrdt
