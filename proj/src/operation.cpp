#include "refcrdt/operation.hpp"

#include "refcrdt/detail/overloaded.hpp"

#include <array>

namespace refcrdt {

namespace {

using detail::overloaded;

std::string slot_string(const Slot& s) { return to_string(s.object) + "." + s.attr; }

std::string last_string(const std::optional<LastRefs>& last) {
  if (!last) return "self";
  std::string s = "{";
  bool first = true;
  for (const auto& r : last->refs) {
    if (!first) s += ",";
    s += to_string(r);
    first = false;
  }
  return s + "}";
}

constexpr std::array kFailureNames{
    "KeyInUse",       "UnknownObject", "UnknownAttribute", "DeletedObject",
    "UnreachableTarget", "MultiValued", "NullSource",      "NullReference",
    "NotUnreachable", "RootObject",    "AlreadyDeleted",   "InvalidLastRefs",
};

}  // namespace

bool is_update(const Operation& op) {
  return std::holds_alternative<op::CreateObject>(op) || std::holds_alternative<op::Init>(op) ||
         std::holds_alternative<op::Assign>(op) || std::holds_alternative<op::AssignNull>(op) ||
         std::holds_alternative<op::Delete>(op);
}

std::string_view op_name(const Operation& o) {
  return std::visit(overloaded{
                        [](const op::CreateObject&) { return "create"; },
                        [](const op::Init&) { return "init"; },
                        [](const op::Assign&) { return "assign"; },
                        [](const op::AssignNull&) { return "assign_null"; },
                        [](const op::Invoke&) { return "invoke"; },
                        [](const op::MayDelete&) { return "may_delete"; },
                        [](const op::Delete&) { return "delete"; },
                        [](const op::Announce&) { return "announce"; },
                    },
                    o);
}

std::string describe(const Operation& o) {
  return std::visit(
      overloaded{
          [](const op::CreateObject& c) {
            std::string s = c.root ? "create root" : "create";
            if (!c.label.empty()) s += " '" + c.label + "'";
            if (c.key) s += " " + to_string(*c.key);
            if (c.anchor) s += " into " + slot_string(*c.anchor);
            return s;
          },
          [](const op::Init& i) {
            return "init(" + slot_string(i.source) + ", " + to_string(i.target) + ")";
          },
          [](const op::Assign& a) { return slot_string(a.dst) + " := " + slot_string(a.src); },
          [](const op::AssignNull& a) { return slot_string(a.slot) + " := null"; },
          [](const op::Invoke& i) { return "invoke " + slot_string(i.slot); },
          [](const op::MayDelete& m) {
            return "may_delete(" + to_string(m.target) + ", " + last_string(m.last) + ")";
          },
          [](const op::Delete& d) {
            return "delete(" + to_string(d.target) + ", " + last_string(d.last) + ")";
          },
          [](const op::Announce&) { return std::string("announce"); },
      },
      o);
}

std::string_view to_string(Failure f) { return kFailureNames.at(static_cast<std::size_t>(f)); }

std::optional<Failure> failure_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kFailureNames.size(); ++i) {
    if (s == kFailureNames[i]) return static_cast<Failure>(i);
  }
  return std::nullopt;
}

std::string outcome_string(const Outcome& o) {
  return std::visit(overloaded{
                        [](EventId e) { return "ok " + to_string(e); },
                        [](bool b) { return std::string(b ? "true" : "false"); },
                        [](ObjectKey k) { return "target " + to_string(k); },
                        [](std::monostate) { return std::string("ok"); },
                        [](Failure f) { return std::string(to_string(f)); },
                    },
                    o);
}

}  // namespace refcrdt
