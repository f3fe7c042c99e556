#include "refcrdt/dot.hpp"

#include <sstream>

namespace refcrdt {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string entry_text(const OutRefEntry& e) {
  if (e.is_null()) return "NULL";
  return "(" + to_string(*e.target) + ", " + to_string(*e.ref) + ")";
}

}  // namespace

std::string graph_snapshot(const ObjectStore& store, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << quoted(name) << " {\n";
  os << "  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& [key, obj] : store) {
    std::string label = obj.label.empty() ? to_string(key) : obj.label + " " + to_string(key);
    if (obj.root) label += " (root)";
    if (obj.deleted) label += " (deleted)";
    for (const auto& [attr, out] : obj.attrs) {
      label += "\\l" + attr + ": {";
      for (std::size_t i = 0; i < out.entries.size(); ++i) {
        label += (i ? ", " : "") + entry_text(out.entries[i]);
      }
      label += "}";
    }
    label += "\\linref: {";
    bool first = true;
    for (const InRefPair& p : obj.inref.current()) {
      label += (first ? "(" : ", (") + to_string(p.source) + ", " + to_string(p.ref) + ")";
      first = false;
    }
    label += "}\\l";
    os << "  " << quoted(to_string(key)) << " [label=" << quoted(label)
       << (obj.deleted ? ", style=dashed" : "") << "];\n";
  }
  for (const auto& [key, obj] : store) {
    for (const auto& [attr, out] : obj.attrs) {
      for (const auto& e : out.entries) {
        if (e.is_null()) continue;
        os << "  " << quoted(to_string(key)) << " -> " << quoted(to_string(*e.target))
           << " [label=" << quoted(attr + " " + to_string(*e.ref)) << "];\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace refcrdt
