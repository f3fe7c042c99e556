#pragma once

#include <string>

#include "refcrdt/refs.hpp"

namespace refcrdt {

/// Graphviz rendering of one replica's object graph: a node per object
/// showing its attributes, listing and deleted flag, and an edge per
/// non-NULL outref entry labelled with its RefId.
std::string graph_snapshot(const ObjectStore& store, const std::string& name);

}  // namespace refcrdt
