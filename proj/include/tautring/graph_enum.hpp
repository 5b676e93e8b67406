#pragma once

#include <vector>

#include "tautring/stable_graph.hpp"

namespace tautring {

// Rebuilds G with canonical vertex order and canonical leg labels
// (markings 1..n, half-edges n+1..).
StableGraph canonical_representative(const StableGraph& G);

// Order used everywhere generators are listed: fewer edges first, then the
// sorted per-vertex (genus, #markings, valence) invariants, then the
// canonical key bytes.
bool graph_order_less(const StableGraph& a, const StableGraph& b);

// One canonical representative per isomorphism class of stable graphs of
// genus g with markings 1..n and exactly e edges, in the documented order.
// The returned reference is owned by a process-wide registry.
const std::vector<StableGraph>& stable_graphs(int g, int n, int e);

// Same, for all edge counts 0..e concatenated.
std::vector<StableGraph> stable_graphs_up_to(int g, int n, int e);

}  // namespace tautring
