#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tautring/moduli.hpp"

namespace tautring {

enum class GraphErrorKind {
    DuplicateLabel,
    DanglingEdgeLabel,
    Disconnected,
    UnstableVertex,
    NegativeGenus,
    BadMarkings,
    NotStabilizable,
    Mismatch,
};

class GraphError : public std::runtime_error {
public:
    GraphError(GraphErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    GraphErrorKind kind() const { return kind_; }

private:
    GraphErrorKind kind_;
};

using Edge = std::pair<int, int>;
// Bijection between leg label sets, e.g. an isomorphism or relabeling.
using LegMap = std::map<int, int>;

struct CanonicalForm {
    // Byte string equal for two graphs iff they are isomorphic fixing markings.
    std::string key;
    // Input leg label -> canonical leg label.
    LegMap leg_map;
    // Input vertex index -> canonical vertex position.
    std::vector<int> vertex_map;
    // All automorphisms of the input graph, as leg maps (identity included).
    std::vector<LegMap> automorphisms;
};

// Dual graph of a stable curve: vertex genera, leg lists (markings 1..n plus
// half-edges), and edges pairing up half-edges. Markings are exactly the
// labels 1..n; half-edge labels are arbitrary other positive integers.
// Instances are immutable and always valid (the constructor validates).
class StableGraph {
public:
    StableGraph(std::vector<int> genera, std::vector<std::vector<int>> legs,
                std::vector<Edge> edges);

    static StableGraph trivial(int g, int n);

    int genus() const { return genus_; }
    int num_markings() const { return num_markings_; }
    int num_vertices() const { return static_cast<int>(genera_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int h1() const { return num_edges() - num_vertices() + 1; }
    bool is_trivial() const { return num_vertices() == 1 && edges_.empty(); }

    const std::vector<int>& genera() const { return genera_; }
    const std::vector<std::vector<int>>& legs() const { return legs_; }
    const std::vector<Edge>& edges() const { return edges_; }

    int genus_of(int v) const { return genera_.at(v); }
    const std::vector<int>& legs_of(int v) const { return legs_.at(v); }
    int valence(int v) const { return static_cast<int>(legs_.at(v).size()); }
    // Dimension of the vertex moduli factor, 3g(v)-3+n(v).
    int vertex_dim(int v) const { return 3 * genus_of(v) - 3 + valence(v); }

    bool has_leg(int l) const { return leg_vertex_.count(l) != 0; }
    int vertex_of(int l) const;
    bool is_marking(int l) const { return l >= 1 && l <= num_markings_; }
    // Partner half-edge across an edge; throws if l is a marking.
    int edge_partner(int l) const;
    bool is_half_edge(int l) const { return has_leg(l) && !is_marking(l); }
    int max_label() const;

    // Contracts the edge at the given index. Non-loop edges merge their two
    // vertices (genera add); loops are removed and bump the vertex genus.
    // All surviving leg labels are preserved.
    StableGraph contract_edge(int edge_index) const;

    bool moduli_allows(Moduli m) const;

    const CanonicalForm& canonical_form() const;
    long automorphism_count() const;

    // Deterministic byte serialization of the raw (labeled) data.
    std::string raw_encoding() const;

    // Paper-style single-line form: "[1, 1] [[2], [3]] [(2, 3)]".
    std::string to_string() const;

    bool operator==(const StableGraph& o) const {
        return genera_ == o.genera_ && legs_ == o.legs_ && edges_ == o.edges_;
    }

private:
    StableGraph() = default;
    void index();

    std::vector<int> genera_;
    std::vector<std::vector<int>> legs_;
    std::vector<Edge> edges_;

    int genus_ = 0;
    int num_markings_ = 0;
    std::map<int, int> leg_vertex_;
    std::map<int, int> partner_;

    friend std::pair<StableGraph, LegMap> stabilize(std::vector<int>,
                                                    std::vector<std::vector<int>>,
                                                    std::vector<Edge>);
};

bool is_isomorphic(const StableGraph& a, const StableGraph& b);

// All marking-preserving isomorphisms a -> b as leg maps (empty if none).
std::vector<LegMap> all_isomorphisms(const StableGraph& a, const StableGraph& b);

// Builds a stable graph out of data that may contain genus-0 vertices of
// valence 1 or 2 (as left behind by deleting a marking), contracting them
// away. Returns the stable graph together with the map telling where each
// surviving input leg went. Throws NotStabilizable if the instability cannot
// be removed.
std::pair<StableGraph, LegMap> stabilize(std::vector<int> genera,
                                         std::vector<std::vector<int>> legs,
                                         std::vector<Edge> edges);

}  // namespace tautring
