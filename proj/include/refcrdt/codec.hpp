#pragma once

// JSON encodings shared by trace files and state dumps.

#include <json.hpp>

#include "refcrdt/clock.hpp"
#include "refcrdt/ids.hpp"
#include "refcrdt/operation.hpp"
#include "refcrdt/refs.hpp"
#include "refcrdt/stability.hpp"
#include "refcrdt/step.hpp"

namespace refcrdt {

using json = nlohmann::json;

void to_json(json& j, ReplicaId r);
void from_json(const json& j, ReplicaId& r);
void to_json(json& j, EventId e);
void from_json(const json& j, EventId& e);
void to_json(json& j, ObjectKey k);
void from_json(const json& j, ObjectKey& k);
void to_json(json& j, RefId r);
void from_json(const json& j, RefId& r);

void to_json(json& j, const VectorClock& c);
void to_json(json& j, const CausalCut& c);
void from_json(const json& j, CausalCut& c);

void to_json(json& j, const Slot& s);
void from_json(const json& j, Slot& s);
void to_json(json& j, const LastRefs& l);
void from_json(const json& j, LastRefs& l);

void to_json(json& j, const OutRefEntry& e);
void to_json(json& j, const OutRef& o);
void to_json(json& j, const InRefPair& p);
void to_json(json& j, const InRef& i);
void to_json(json& j, const ObjectRecord& r);
void to_json(json& j, const ObjectStore& s);

// Operation is a std::variant alias, so ADL does not find these; call
// encode/decode_operation instead of json conversions.
void to_json(json& j, const Operation& op);
void from_json(const json& j, Operation& op);
inline json encode(const Operation& op) {
  json j;
  to_json(j, op);
  return j;
}
inline Operation decode_operation(const json& j) {
  Operation op;
  from_json(j, op);
  return op;
}

void to_json(json& j, const QueryKey& q);
void to_json(json& j, const StabilityQuery& q);
void to_json(json& j, const StableFrontier& f);
void to_json(json& j, const StabilityState& s);
void to_json(json& j, const QueryRegistration& r);
void to_json(json& j, const ClockAnnouncement& a);

}  // namespace refcrdt
