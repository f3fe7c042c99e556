#include "refcrdt/ids.hpp"

namespace refcrdt {

std::string to_string(ReplicaId r) { return "r" + std::to_string(r.value); }

std::string to_string(EventId e) {
  return "e" + std::to_string(e.replica.value) + "." + std::to_string(e.seq);
}

std::string to_string(ObjectKey k) {
  return "o" + std::to_string(k.origin.value) + "." + std::to_string(k.counter);
}

std::string to_string(RefId r) {
  return "#" + std::to_string(r.origin.value) + "." + std::to_string(r.counter);
}

}  // namespace refcrdt
