#include "tautring/graph_enum.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <tuple>

namespace tautring {

StableGraph canonical_representative(const StableGraph& G) {
    const CanonicalForm& cf = G.canonical_form();
    const int V = G.num_vertices();
    std::vector<int> genera(V);
    std::vector<std::vector<int>> legs(V);
    for (int v = 0; v < V; ++v) {
        int p = cf.vertex_map[v];
        genera[p] = G.genus_of(v);
        for (int l : G.legs_of(v)) legs[p].push_back(cf.leg_map.at(l));
    }
    for (auto& ls : legs) std::sort(ls.begin(), ls.end());
    std::vector<Edge> edges;
    for (const Edge& e : G.edges()) {
        int a = cf.leg_map.at(e.first), b = cf.leg_map.at(e.second);
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges.begin(), edges.end());
    return StableGraph(genera, legs, edges);
}

bool graph_order_less(const StableGraph& a, const StableGraph& b) {
    if (a.num_edges() != b.num_edges()) return a.num_edges() < b.num_edges();
    auto invariants = [](const StableGraph& G) {
        std::vector<std::tuple<int, int, int>> inv;
        for (int v = 0; v < G.num_vertices(); ++v) {
            int marks = 0;
            for (int l : G.legs_of(v))
                if (G.is_marking(l)) ++marks;
            inv.emplace_back(G.genus_of(v), marks, G.valence(v));
        }
        std::sort(inv.begin(), inv.end());
        return inv;
    };
    auto ia = invariants(a), ib = invariants(b);
    if (ia != ib) return ia < ib;
    return a.canonical_form().key < b.canonical_form().key;
}

namespace {

std::vector<StableGraph> expand_by_one_edge(const StableGraph& G) {
    std::vector<StableGraph> out;
    const int fresh = std::max(G.max_label(), G.num_markings()) + 1;
    for (int v = 0; v < G.num_vertices(); ++v) {
        // Self-loop: trade one unit of genus for a cycle.
        if (G.genus_of(v) >= 1) {
            auto genera = G.genera();
            auto legs = G.legs();
            auto edges = G.edges();
            genera[v] -= 1;
            legs[v].push_back(fresh);
            legs[v].push_back(fresh + 1);
            edges.emplace_back(fresh, fresh + 1);
            out.emplace_back(genera, legs, edges);
        }
        // Vertex splits over genus distributions and leg subsets.
        const std::vector<int>& vl = G.legs_of(v);
        const int nl = static_cast<int>(vl.size());
        for (int g1 = 0; g1 <= G.genus_of(v); ++g1) {
            int g2 = G.genus_of(v) - g1;
            for (long mask = 0; mask < (1L << nl); ++mask) {
                std::vector<int> side1, side2;
                for (int i = 0; i < nl; ++i)
                    ((mask >> i) & 1 ? side1 : side2).push_back(vl[i]);
                if (2 * g1 - 2 + static_cast<int>(side1.size()) + 1 <= 0) continue;
                if (2 * g2 - 2 + static_cast<int>(side2.size()) + 1 <= 0) continue;
                auto genera = G.genera();
                auto legs = G.legs();
                auto edges = G.edges();
                genera[v] = g1;
                side1.push_back(fresh);
                legs[v] = side1;
                genera.push_back(g2);
                side2.push_back(fresh + 1);
                legs.push_back(side2);
                edges.emplace_back(fresh, fresh + 1);
                out.emplace_back(genera, legs, edges);
            }
        }
    }
    return out;
}

}  // namespace

const std::vector<StableGraph>& stable_graphs(int g, int n, int e) {
    static std::map<std::tuple<int, int, int>, std::unique_ptr<std::vector<StableGraph>>> registry;
    static std::mutex mtx;

    const auto key = std::make_tuple(g, n, e);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = registry.find(key);
        if (it != registry.end()) return *it->second;
    }

    auto result = std::make_unique<std::vector<StableGraph>>();
    if (2 * g - 2 + n <= 0)
        throw GraphError(GraphErrorKind::UnstableVertex, "unstable (g,n)");
    if (e < 0 || e > 3 * g - 3 + n) {
        // Out of range: empty list.
    } else if (e == 0) {
        result->push_back(StableGraph::trivial(g, n));
    } else {
        const std::vector<StableGraph>& prev = stable_graphs(g, n, e - 1);
        std::set<std::string> seen;
        for (const StableGraph& G : prev) {
            for (const StableGraph& H : expand_by_one_edge(G)) {
                StableGraph rep = canonical_representative(H);
                if (seen.insert(rep.canonical_form().key).second) result->push_back(rep);
            }
        }
        std::sort(result->begin(), result->end(), graph_order_less);
    }

    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = registry.emplace(key, std::move(result));
    return *it->second;
}

std::vector<StableGraph> stable_graphs_up_to(int g, int n, int e) {
    std::vector<StableGraph> out;
    for (int i = 0; i <= std::min(e, 3 * g - 3 + n); ++i) {
        const auto& gs = stable_graphs(g, n, i);
        out.insert(out.end(), gs.begin(), gs.end());
    }
    return out;
}

}  // namespace tautring
