#include "tautring/stable_graph.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <shared_mutex>
#include <sstream>

namespace tautring {

namespace {

std::string encode_int_list(const std::vector<int>& xs) {
    std::string s = "[";
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(xs[i]);
    }
    return s + "]";
}

// Invokes fn once per element of the cartesian product of all permutations of
// the given groups. Each group is permuted in place inside `perms`.
void for_each_permutation_product(std::vector<std::vector<int>>& perms, size_t idx,
                                  const std::function<void()>& fn) {
    if (idx == perms.size()) {
        fn();
        return;
    }
    std::vector<int>& g = perms[idx];
    std::sort(g.begin(), g.end());
    do {
        for_each_permutation_product(perms, idx + 1, fn);
    } while (std::next_permutation(g.begin(), g.end()));
}

}  // namespace

StableGraph::StableGraph(std::vector<int> genera, std::vector<std::vector<int>> legs,
                         std::vector<Edge> edges)
    : genera_(std::move(genera)), legs_(std::move(legs)), edges_(std::move(edges)) {
    index();

    for (int v = 0; v < num_vertices(); ++v) {
        if (2 * genus_of(v) - 2 + valence(v) <= 0) {
            throw GraphError(GraphErrorKind::UnstableVertex,
                             "unstable vertex " + std::to_string(v) + " in " + to_string());
        }
    }
}

void StableGraph::index() {
    if (genera_.size() != legs_.size())
        throw GraphError(GraphErrorKind::Mismatch, "genera/legs length mismatch");
    if (genera_.empty())
        throw GraphError(GraphErrorKind::Mismatch, "graph needs at least one vertex");
    for (int g : genera_)
        if (g < 0) throw GraphError(GraphErrorKind::NegativeGenus, "negative vertex genus");

    leg_vertex_.clear();
    partner_.clear();
    for (int v = 0; v < num_vertices(); ++v) {
        for (int l : legs_[v]) {
            if (l <= 0)
                throw GraphError(GraphErrorKind::BadMarkings, "leg labels must be positive");
            if (!leg_vertex_.emplace(l, v).second)
                throw GraphError(GraphErrorKind::DuplicateLabel,
                                 "leg label " + std::to_string(l) + " appears twice");
        }
    }
    for (const Edge& e : edges_) {
        if (e.first == e.second)
            throw GraphError(GraphErrorKind::DanglingEdgeLabel,
                             "edge joins a half-edge to itself");
        for (int h : {e.first, e.second}) {
            if (!leg_vertex_.count(h))
                throw GraphError(GraphErrorKind::DanglingEdgeLabel,
                                 "edge label " + std::to_string(h) + " is not a leg");
            if (partner_.count(h))
                throw GraphError(GraphErrorKind::DuplicateLabel,
                                 "half-edge " + std::to_string(h) + " used in two edges");
        }
        partner_[e.first] = e.second;
        partner_[e.second] = e.first;
    }

    // Markings = legs not involved in edges; they must be exactly 1..n.
    std::vector<int> markings;
    for (const auto& [l, v] : leg_vertex_)
        if (!partner_.count(l)) markings.push_back(l);
    std::sort(markings.begin(), markings.end());
    num_markings_ = static_cast<int>(markings.size());
    for (int i = 0; i < num_markings_; ++i) {
        if (markings[i] != i + 1)
            throw GraphError(GraphErrorKind::BadMarkings,
                             "markings are not exactly 1..n in " + to_string());
    }

    // Connectivity over edges.
    std::vector<int> comp(num_vertices(), -1);
    std::vector<int> stack = {0};
    comp[0] = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int l : legs_[v]) {
            auto it = partner_.find(l);
            if (it == partner_.end()) continue;
            int w = leg_vertex_.at(it->second);
            if (comp[w] == -1) {
                comp[w] = 0;
                stack.push_back(w);
            }
        }
    }
    for (int v = 0; v < num_vertices(); ++v)
        if (comp[v] == -1)
            throw GraphError(GraphErrorKind::Disconnected, "graph is not connected: " + to_string());

    genus_ = std::accumulate(genera_.begin(), genera_.end(), 0) + h1();
}

StableGraph StableGraph::trivial(int g, int n) {
    if (2 * g - 2 + n <= 0)
        throw GraphError(GraphErrorKind::UnstableVertex,
                         "(g,n)=(" + std::to_string(g) + "," + std::to_string(n) + ") is unstable");
    std::vector<int> marks(n);
    std::iota(marks.begin(), marks.end(), 1);
    return StableGraph({g}, {marks}, {});
}

int StableGraph::vertex_of(int l) const {
    auto it = leg_vertex_.find(l);
    if (it == leg_vertex_.end())
        throw GraphError(GraphErrorKind::DanglingEdgeLabel,
                         "no leg " + std::to_string(l) + " in " + to_string());
    return it->second;
}

int StableGraph::edge_partner(int l) const {
    auto it = partner_.find(l);
    if (it == partner_.end())
        throw GraphError(GraphErrorKind::DanglingEdgeLabel,
                         "leg " + std::to_string(l) + " is not a half-edge");
    return it->second;
}

int StableGraph::max_label() const {
    int m = 0;
    for (const auto& [l, v] : leg_vertex_) m = std::max(m, l);
    return m;
}

StableGraph StableGraph::contract_edge(int edge_index) const {
    const Edge e = edges_.at(edge_index);
    const int va = vertex_of(e.first), vb = vertex_of(e.second);

    std::vector<Edge> new_edges = edges_;
    new_edges.erase(new_edges.begin() + edge_index);

    auto strip = [&](std::vector<int> ls) {
        ls.erase(std::remove_if(ls.begin(), ls.end(),
                                [&](int l) { return l == e.first || l == e.second; }),
                 ls.end());
        return ls;
    };

    if (va == vb) {
        std::vector<int> new_genera = genera_;
        new_genera[va] += 1;
        std::vector<std::vector<int>> new_legs = legs_;
        new_legs[va] = strip(new_legs[va]);
        return StableGraph(new_genera, new_legs, new_edges);
    }
    const int keep = std::min(va, vb), drop = std::max(va, vb);
    std::vector<int> new_genera;
    std::vector<std::vector<int>> new_legs;
    for (int v = 0; v < num_vertices(); ++v) {
        if (v == drop) continue;
        if (v == keep) {
            new_genera.push_back(genera_[va] + genera_[vb]);
            std::vector<int> ls = legs_[keep];
            ls.insert(ls.end(), legs_[drop].begin(), legs_[drop].end());
            new_legs.push_back(strip(ls));
        } else {
            new_genera.push_back(genera_[v]);
            new_legs.push_back(legs_[v]);
        }
    }
    return StableGraph(new_genera, new_legs, new_edges);
}

bool StableGraph::moduli_allows(Moduli m) const {
    switch (m) {
        case Moduli::St: return true;
        case Moduli::Sm: return edges_.empty();
        case Moduli::Ct: return h1() == 0;
        case Moduli::Tl: {
            int loops = 0;
            for (const Edge& e : edges_)
                if (vertex_of(e.first) == vertex_of(e.second)) ++loops;
            return h1() == loops;
        }
        case Moduli::Rt:
            for (int v = 0; v < num_vertices(); ++v)
                if (genus_of(v) == genus_) return true;
            return false;
    }
    return true;
}

std::string StableGraph::raw_encoding() const { return to_string(); }

std::string StableGraph::to_string() const {
    std::ostringstream os;
    os << encode_int_list(genera_) << " [";
    for (size_t v = 0; v < legs_.size(); ++v) {
        if (v) os << ", ";
        os << encode_int_list(legs_[v]);
    }
    os << "] [";
    for (size_t i = 0; i < edges_.size(); ++i) {
        if (i) os << ", ";
        os << "(" << edges_[i].first << ", " << edges_[i].second << ")";
    }
    os << "]";
    return os.str();
}

namespace {

CanonicalForm compute_canonical(const StableGraph& G) {
    const int V = G.num_vertices();
    const int n = G.num_markings();

    // Isomorphism-invariant vertex signature used to restrict the search.
    auto vertex_invariant = [&](int v) {
        std::vector<int> marks;
        int half_edges = 0, self_loops = 0;
        for (int l : G.legs_of(v)) {
            if (G.is_marking(l))
                marks.push_back(l);
            else
                ++half_edges;
        }
        for (const Edge& e : G.edges())
            if (G.vertex_of(e.first) == v && G.vertex_of(e.second) == v) ++self_loops;
        std::sort(marks.begin(), marks.end());
        std::string s = std::to_string(G.genus_of(v)) + "|" + encode_int_list(marks) + "|" +
                        std::to_string(half_edges) + "|" + std::to_string(self_loops);
        return s;
    };

    std::map<std::string, std::vector<int>> classes;
    for (int v = 0; v < V; ++v) classes[vertex_invariant(v)].push_back(v);
    std::vector<std::vector<int>> vertex_groups;
    for (auto& [inv, vs] : classes) vertex_groups.push_back(vs);

    std::string best;
    std::vector<LegMap> best_leg_maps;
    std::vector<std::vector<int>> best_vertex_maps;

    for_each_permutation_product(vertex_groups, 0, [&]() {
        // Position assignment for this vertex ordering.
        std::vector<int> vertex_at_pos;
        for (const auto& grp : vertex_groups)
            vertex_at_pos.insert(vertex_at_pos.end(), grp.begin(), grp.end());
        std::vector<int> pos_of_vertex(V);
        for (int p = 0; p < V; ++p) pos_of_vertex[vertex_at_pos[p]] = p;

        // Half-edges of each vertex, grouped by (self-loop?, partner position).
        // Only permutations within a group can be part of an isomorphism.
        std::vector<std::vector<int>> he_groups;
        for (int p = 0; p < V; ++p) {
            int v = vertex_at_pos[p];
            std::map<std::pair<int, int>, std::vector<int>> groups;
            for (int l : G.legs_of(v)) {
                if (G.is_marking(l)) continue;
                int w = G.vertex_of(G.edge_partner(l));
                groups[{w == v ? 1 : 0, pos_of_vertex[w]}].push_back(l);
            }
            for (auto& [key, hs] : groups) he_groups.push_back(hs);
        }

        for_each_permutation_product(he_groups, 0, [&]() {
            LegMap lm;
            for (int m = 1; m <= n; ++m) lm[m] = m;
            int next = n + 1;
            for (const auto& grp : he_groups)
                for (int h : grp) lm[h] = next++;

            std::string enc = "g";
            for (int p = 0; p < V; ++p) enc += "," + std::to_string(G.genus_of(vertex_at_pos[p]));
            enc += ";l";
            for (int p = 0; p < V; ++p) {
                std::vector<int> ls;
                for (int l : G.legs_of(vertex_at_pos[p])) ls.push_back(lm.at(l));
                std::sort(ls.begin(), ls.end());
                enc += ";" + encode_int_list(ls);
            }
            std::vector<std::pair<int, int>> es;
            for (const Edge& e : G.edges()) {
                int a = lm.at(e.first), b = lm.at(e.second);
                es.emplace_back(std::min(a, b), std::max(a, b));
            }
            std::sort(es.begin(), es.end());
            enc += ";e";
            for (auto& [a, b] : es) enc += ";" + std::to_string(a) + "," + std::to_string(b);

            if (best.empty() || enc < best) {
                best = enc;
                best_leg_maps.clear();
                best_vertex_maps.clear();
            }
            if (enc == best) {
                best_leg_maps.push_back(lm);
                best_vertex_maps.push_back(pos_of_vertex);
            }
        });
    });

    CanonicalForm cf;
    cf.key = best;
    cf.leg_map = best_leg_maps.front();
    cf.vertex_map = best_vertex_maps.front();
    // Automorphisms: inverse of the chosen labeling composed with each
    // minimum-achieving labeling.
    LegMap inv0;
    for (const auto& [l, c] : cf.leg_map) inv0[c] = l;
    for (const auto& lm : best_leg_maps) {
        LegMap aut;
        for (const auto& [l, c] : lm) aut[l] = inv0.at(c);
        cf.automorphisms.push_back(aut);
    }
    return cf;
}

}  // namespace

const CanonicalForm& StableGraph::canonical_form() const {
    static std::map<std::string, std::unique_ptr<CanonicalForm>> memo;
    static std::shared_mutex mtx;
    const std::string raw = raw_encoding();
    {
        std::shared_lock lock(mtx);
        auto it = memo.find(raw);
        if (it != memo.end()) return *it->second;
    }
    auto cf = std::make_unique<CanonicalForm>(compute_canonical(*this));
    {
        std::unique_lock lock(mtx);
        auto [it, inserted] = memo.emplace(raw, std::move(cf));
        return *it->second;
    }
}

long StableGraph::automorphism_count() const {
    return static_cast<long>(canonical_form().automorphisms.size());
}

bool is_isomorphic(const StableGraph& a, const StableGraph& b) {
    if (a.genus() != b.genus() || a.num_markings() != b.num_markings())
        throw GraphError(GraphErrorKind::Mismatch, "isomorphism test across different (g,n)");
    return a.canonical_form().key == b.canonical_form().key;
}

std::vector<LegMap> all_isomorphisms(const StableGraph& a, const StableGraph& b) {
    if (a.genus() != b.genus() || a.num_markings() != b.num_markings())
        throw GraphError(GraphErrorKind::Mismatch, "isomorphism test across different (g,n)");
    const CanonicalForm& ca = a.canonical_form();
    const CanonicalForm& cb = b.canonical_form();
    if (ca.key != cb.key) return {};
    LegMap base;  // a -> b through the canonical labels
    {
        LegMap inv_b;
        for (const auto& [l, c] : cb.leg_map) inv_b[c] = l;
        for (const auto& [l, c] : ca.leg_map) base[l] = inv_b.at(c);
    }
    std::vector<LegMap> isos;
    for (const LegMap& aut : ca.automorphisms) {
        LegMap iso;
        for (const auto& [l, m] : aut) iso[l] = base.at(m);
        isos.push_back(iso);
    }
    return isos;
}

std::pair<StableGraph, LegMap> stabilize(std::vector<int> genera,
                                         std::vector<std::vector<int>> legs,
                                         std::vector<Edge> edges) {
    // Running relocation: original surviving leg -> current label.
    LegMap reloc;
    for (const auto& ls : legs)
        for (int l : ls) reloc[l] = l;

    auto erase_source_of = [&](int current) {
        for (auto it = reloc.begin(); it != reloc.end();) {
            if (it->second == current)
                it = reloc.erase(it);
            else
                ++it;
        }
    };
    auto redirect = [&](int from, int to) {
        for (auto& [src, cur] : reloc)
            if (cur == from) cur = to;
    };

    // Marking set is fixed by the input: labels not appearing in edges.
    std::set<int> in_edges;
    for (const Edge& e : edges) {
        in_edges.insert(e.first);
        in_edges.insert(e.second);
    }

    auto is_marking = [&](int l) { return !in_edges.count(l); };

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t v = 0; v < genera.size(); ++v) {
            int val = static_cast<int>(legs[v].size());
            if (2 * genera[v] - 2 + val > 0) continue;
            if (genera[v] != 0)
                throw GraphError(GraphErrorKind::NotStabilizable,
                                 "unstable positive-genus vertex cannot be contracted");
            auto partner = [&](int h) -> std::pair<int, size_t> {
                for (size_t i = 0; i < edges.size(); ++i) {
                    if (edges[i].first == h) return {edges[i].second, i};
                    if (edges[i].second == h) return {edges[i].first, i};
                }
                throw GraphError(GraphErrorKind::DanglingEdgeLabel, "half-edge without edge");
            };
            auto drop_vertex = [&](size_t dv) {
                genera.erase(genera.begin() + dv);
                legs.erase(legs.begin() + dv);
            };

            if (val == 2) {
                int a = legs[v][0], b = legs[v][1];
                if (is_marking(a) && is_marking(b))
                    throw GraphError(GraphErrorKind::NotStabilizable,
                                     "genus-0 vertex with two markings only");
                if (is_marking(b)) std::swap(a, b);  // ensure b is a half-edge
                if (is_marking(a)) {
                    auto [y, ei] = partner(b);
                    // Marking a moves to the far end of the removed edge.
                    size_t wy = 0;
                    for (size_t w = 0; w < legs.size(); ++w)
                        for (int& l : legs[w])
                            if (l == y) {
                                l = a;
                                wy = w;
                            }
                    (void)wy;
                    edges.erase(edges.begin() + ei);
                    in_edges.erase(y);
                    erase_source_of(b);
                    redirect(y, a);
                    drop_vertex(v);
                } else {
                    // Two half-edges: splice the neighbors together.
                    auto [x, ei1] = partner(a);
                    if (x == b)
                        throw GraphError(GraphErrorKind::NotStabilizable,
                                         "isolated genus-0 vertex with a self-loop");
                    auto [y, ei2] = partner(b);
                    std::vector<Edge> kept;
                    for (size_t i = 0; i < edges.size(); ++i)
                        if (i != ei1 && i != ei2) kept.push_back(edges[i]);
                    kept.emplace_back(x, y);
                    edges = std::move(kept);
                    erase_source_of(a);
                    erase_source_of(b);
                    drop_vertex(v);
                }
            } else if (val == 1) {
                int a = legs[v][0];
                if (is_marking(a))
                    throw GraphError(GraphErrorKind::NotStabilizable,
                                     "genus-0 vertex with a single marking");
                auto [x, ei] = partner(a);
                edges.erase(edges.begin() + ei);
                in_edges.erase(x);
                for (auto& ls : legs)
                    ls.erase(std::remove(ls.begin(), ls.end(), x), ls.end());
                erase_source_of(a);
                erase_source_of(x);
                drop_vertex(v);
            } else {
                throw GraphError(GraphErrorKind::NotStabilizable,
                                 "genus-0 vertex of valence 0");
            }
            changed = true;
            break;
        }
    }

    return {StableGraph(genera, legs, edges), reloc};
}

}  // namespace tautring
