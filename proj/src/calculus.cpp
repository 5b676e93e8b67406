#include "tautring/calculus.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "tautring/graph_enum.hpp"
#include "tautring/integrals.hpp"

namespace tautring {

namespace {

// ---------------------------------------------------------------------------
// Contraction maps between stable graphs
// ---------------------------------------------------------------------------

// A contraction c: Delta -> A, given by the set of collapsed edges, the
// bijection of surviving legs onto the legs of A, and the vertex surjection.
struct Contraction {
    std::vector<Edge> contracted;  // edges of Delta, by label pair
    LegMap legs;                   // surviving Delta leg -> A leg
    std::vector<int> vertex_map;   // Delta vertex -> A vertex
};

struct ContractSetResult {
    StableGraph graph;
    std::vector<int> vertex_map;
};

ContractSetResult contract_edge_set(const StableGraph& G, const std::vector<int>& edge_indices) {
    const int V = G.num_vertices();
    std::vector<int> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    std::set<int> removed_halves;
    std::set<int> chosen(edge_indices.begin(), edge_indices.end());
    for (int i : edge_indices) {
        const Edge& e = G.edges()[i];
        removed_halves.insert(e.first);
        removed_halves.insert(e.second);
        int a = find(G.vertex_of(e.first)), b = find(G.vertex_of(e.second));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    std::map<int, int> class_index;
    std::vector<int> vertex_map(V);
    for (int v = 0; v < V; ++v) {
        int r = find(v);
        auto [it, inserted] = class_index.emplace(r, static_cast<int>(class_index.size()));
        vertex_map[v] = it->second;
    }
    const int W = static_cast<int>(class_index.size());
    std::vector<int> genera(W, 0), class_size(W, 0), class_edges(W, 0);
    std::vector<std::vector<int>> legs(W);
    for (int v = 0; v < V; ++v) {
        genera[vertex_map[v]] += G.genus_of(v);
        class_size[vertex_map[v]] += 1;
        for (int l : G.legs_of(v))
            if (!removed_halves.count(l)) legs[vertex_map[v]].push_back(l);
    }
    for (int i : edge_indices) class_edges[vertex_map[G.vertex_of(G.edges()[i].first)]] += 1;
    // Contracting a connected subgraph absorbs its first Betti number.
    for (int c = 0; c < W; ++c) genera[c] += class_edges[c] - (class_size[c] - 1);

    std::vector<Edge> edges;
    for (int i = 0; i < G.num_edges(); ++i)
        if (!chosen.count(i)) edges.push_back(G.edges()[i]);
    return {StableGraph(genera, legs, edges), vertex_map};
}

int vertex_image_via_legs(const StableGraph& from, const StableGraph& to, const LegMap& iso,
                          int v) {
    const auto& ls = from.legs_of(v);
    if (ls.empty()) return 0;  // single-vertex graphs only
    return to.vertex_of(iso.at(ls.front()));
}

std::vector<Contraction> compute_contractions(const StableGraph& D, const StableGraph& A) {
    std::vector<Contraction> out;
    const int diff = D.num_edges() - A.num_edges();
    if (diff < 0) return out;

    std::vector<int> pick;
    std::function<void(int)> choose = [&](int start) {
        if (static_cast<int>(pick.size()) == diff) {
            ContractSetResult cr = contract_edge_set(D, pick);
            for (const LegMap& iso : all_isomorphisms(cr.graph, A)) {
                Contraction c;
                for (int i : pick) c.contracted.push_back(D.edges()[i]);
                for (const auto& [l, t] : iso) c.legs[l] = t;
                c.vertex_map.resize(D.num_vertices());
                for (int v = 0; v < D.num_vertices(); ++v)
                    c.vertex_map[v] = vertex_image_via_legs(cr.graph, A, iso, cr.vertex_map[v]);
                out.push_back(std::move(c));
            }
            return;
        }
        for (int i = start; i < D.num_edges(); ++i) {
            pick.push_back(i);
            choose(i + 1);
            pick.pop_back();
        }
    };
    choose(0);
    return out;
}

const std::vector<Contraction>& contractions_to(const StableGraph& D, const StableGraph& A) {
    static std::map<std::string, std::unique_ptr<std::vector<Contraction>>> memo;
    static std::mutex mtx;
    const std::string key = D.raw_encoding() + " >> " + A.raw_encoding();
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = memo.find(key);
        if (it != memo.end()) return *it->second;
    }
    auto value = std::make_unique<std::vector<Contraction>>(compute_contractions(D, A));
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = memo.emplace(key, std::move(value));
    return *it->second;
}

// ---------------------------------------------------------------------------
// Monomial helpers
// ---------------------------------------------------------------------------

// Multiplies every monomial by (sum_{v in vertices} kappa_a(v))^e.
std::vector<KpMonomial> expand_kappa_power(const std::vector<KpMonomial>& monos,
                                           const std::vector<int>& vertices, int a, int e) {
    if (e == 0) return monos;
    std::vector<KpMonomial> out;
    const int k = static_cast<int>(vertices.size());
    if (k == 0) return out;  // no vertex can absorb the class: zero
    std::vector<int> comp(k, 0);
    std::function<void(int, int)> rec = [&](int i, int rem) {
        if (i == k - 1) {
            comp[i] = rem;
            std::vector<unsigned long> parts(comp.begin(), comp.end());
            Rat c{multinomial(parts)};
            for (const KpMonomial& m : monos) {
                KpMonomial t = m;
                t.coeff *= c;
                for (int j = 0; j < k; ++j)
                    if (comp[j] > 0) t.kappa[vertices[j]][a] += comp[j];
                out.push_back(std::move(t));
            }
            return;
        }
        for (int x = 0; x <= rem; ++x) {
            comp[i] = x;
            rec(i + 1, rem - x);
        }
    };
    rec(0, e);
    return out;
}

// Multiplies T by a kappa-psi monomial on the ambient space (psi keyed by
// markings, kappa on the single ambient vertex): the decoration pulls back
// along each stratum's gluing map, kappa spreading over the vertices.
TautClass decorate(const TautClass& T, const KpMonomial& deco) {
    TautClass out(T.g(), T.n());
    for (const DecoratedStratum& t : T.terms()) {
        const StableGraph& G = t.graph;
        std::vector<int> all_vertices(G.num_vertices());
        std::iota(all_vertices.begin(), all_vertices.end(), 0);
        for (const KpMonomial& m : t.poly) {
            KpMonomial base = m;
            base.coeff *= deco.coeff;
            for (const auto& [mark, e] : deco.psi) base.psi[mark] += e;
            std::vector<KpMonomial> monos = {base};
            for (const auto& [a, e] : deco.kappa.at(0))
                if (e > 0) monos = expand_kappa_power(monos, all_vertices, a, e);
            for (KpMonomial& nm : monos) {
                if (nm.coeff == 0) continue;
                if (exceeds_vertex_dim(G, nm)) continue;
                out.add_term(G, nm);
            }
        }
    }
    return out;
}

std::string contraction_signature(const Contraction& c, const LegMap& sigma_inv) {
    std::vector<std::pair<int, int>> edges;
    for (const Edge& e : c.contracted) {
        int a = sigma_inv.at(e.first), b = sigma_inv.at(e.second);
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges.begin(), edges.end());
    std::string s = "C";
    for (auto& [a, b] : edges) s += std::to_string(a) + "," + std::to_string(b) + ";";
    s += "L";
    std::map<int, int> legs;  // sigma-composed, sorted by source
    for (const auto& [l, t] : c.legs) legs[sigma_inv.at(l)] = t;
    for (const auto& [l, t] : legs) s += std::to_string(l) + ":" + std::to_string(t) + ";";
    return s;
}

bool edges_meet(const std::vector<Edge>& a, const std::vector<Edge>& b) {
    for (const Edge& x : a)
        for (const Edge& y : b)
            if (x == y || (x.first == y.second && x.second == y.first)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Boundary pullback: excess intersection over common degenerations
// ---------------------------------------------------------------------------

void process_triple(ProdTautClass& out, const StableGraph& D, const Contraction& ca,
                    const Contraction& cb, const StableGraph& A, const StableGraph& B,
                    const KpMonomial& mb) {
    // Transport the decoration of [B, mb] onto D through cb.
    LegMap cb_inv;
    for (const auto& [l, t] : cb.legs) cb_inv[t] = l;
    KpMonomial base = KpMonomial::unit(D.num_vertices(), mb.coeff);
    for (const auto& [lB, e] : mb.psi)
        if (e > 0) base.psi[cb_inv.at(lB)] += e;

    std::vector<std::vector<int>> fiber_b(B.num_vertices());
    for (int v = 0; v < D.num_vertices(); ++v) fiber_b[cb.vertex_map[v]].push_back(v);
    std::vector<KpMonomial> monos = {base};
    for (int vb = 0; vb < B.num_vertices(); ++vb)
        for (const auto& [a, e] : mb.kappa[vb])
            if (e > 0) monos = expand_kappa_power(monos, fiber_b[vb], a, e);

    // Excess factor (-psi_h - psi_h') for every edge surviving in both maps.
    std::set<std::pair<int, int>> collapsed;
    for (const auto* coll : {&ca.contracted, &cb.contracted})
        for (const Edge& e : *coll) {
            collapsed.emplace(e.first, e.second);
            collapsed.emplace(e.second, e.first);
        }
    for (const Edge& e : D.edges()) {
        if (collapsed.count({e.first, e.second})) continue;
        std::vector<KpMonomial> next;
        for (const KpMonomial& m : monos)
            for (int h : {e.first, e.second}) {
                KpMonomial t = m;
                t.coeff = -t.coeff;
                t.psi[h] += 1;
                next.push_back(std::move(t));
            }
        monos = std::move(next);
    }

    // Split along ca onto the vertex factors of A.
    std::vector<std::vector<int>> fiber_a(A.num_vertices());
    for (int v = 0; v < D.num_vertices(); ++v) fiber_a[ca.vertex_map[v]].push_back(v);

    struct FiberData {
        StableGraph graph;
        LegMap relabel;          // D leg -> factor leg
        std::vector<int> local;  // D vertex -> factor vertex (or -1)
    };
    std::vector<FiberData> fibers;
    for (int w = 0; w < A.num_vertices(); ++w) {
        const std::vector<int>& fv = fiber_a[w];
        std::vector<int> local(D.num_vertices(), -1);
        for (size_t i = 0; i < fv.size(); ++i) local[fv[i]] = static_cast<int>(i);

        const std::vector<int>& aw = A.legs_of(w);
        const int nw = static_cast<int>(aw.size());
        LegMap relabel;
        std::vector<int> internal;
        for (int v : fv)
            for (int l : D.legs_of(v)) {
                auto it = ca.legs.find(l);
                if (it != ca.legs.end()) {
                    int pos =
                        static_cast<int>(std::find(aw.begin(), aw.end(), it->second) - aw.begin());
                    relabel[l] = pos + 1;
                } else {
                    internal.push_back(l);
                }
            }
        std::sort(internal.begin(), internal.end());
        int next = nw + 1;
        for (int l : internal) relabel[l] = next++;

        std::vector<int> genera;
        std::vector<std::vector<int>> legs;
        for (int v : fv) {
            genera.push_back(D.genus_of(v));
            std::vector<int> ls;
            for (int l : D.legs_of(v)) ls.push_back(relabel.at(l));
            legs.push_back(ls);
        }
        std::vector<Edge> edges;
        for (const Edge& e : ca.contracted) {
            if (local[D.vertex_of(e.first)] == -1) continue;
            edges.emplace_back(relabel.at(e.first), relabel.at(e.second));
        }
        StableGraph H(genera, legs, edges);
        if (H.genus() != A.genus_of(w)) throw std::logic_error("pullback fiber genus mismatch");
        fibers.push_back({std::move(H), std::move(relabel), std::move(local)});
    }

    for (const KpMonomial& dm : monos) {
        if (dm.coeff == 0) continue;
        ProdTensorTerm term;
        term.coeff = dm.coeff;
        bool ok = true;
        for (int w = 0; w < A.num_vertices() && ok; ++w) {
            const FiberData& fd = fibers[w];
            KpMonomial fm = KpMonomial::unit(fd.graph.num_vertices());
            for (int v = 0; v < D.num_vertices(); ++v) {
                if (fd.local[v] == -1) continue;
                for (const auto& [a, e] : dm.kappa[v])
                    if (e > 0) fm.kappa[fd.local[v]][a] += e;
            }
            for (const auto& [l, e] : dm.psi) {
                auto it = fd.relabel.find(l);
                if (it != fd.relabel.end()) fm.psi[it->second] += e;
            }
            if (exceeds_vertex_dim(fd.graph, fm)) {
                ok = false;
                break;
            }
            TautClass factor(fd.graph.genus(), fd.graph.num_markings());
            factor.add_term(fd.graph, fm);
            term.factors.push_back(std::move(factor));
        }
        if (ok) out.add_term(std::move(term));
    }
}

ProdTautClass pullback_stratum(const StableGraph& A, const StableGraph& B, const KpMonomial& mb) {
    const int g = A.genus(), n = A.num_markings();
    ProdTautClass out(A);
    const int cap = std::min(A.num_edges() + B.num_edges(), 3 * g - 3 + n);
    for (int e = std::max(A.num_edges(), B.num_edges()); e <= cap; ++e) {
        for (const StableGraph& D : stable_graphs(g, n, e)) {
            const auto& to_a = contractions_to(D, A);
            if (to_a.empty()) continue;
            const auto& to_b = contractions_to(D, B);
            if (to_b.empty()) continue;

            std::vector<LegMap> aut_inverses;
            for (const LegMap& aut : D.canonical_form().automorphisms) {
                LegMap inv;
                for (const auto& [l, t] : aut) inv[t] = l;
                aut_inverses.push_back(std::move(inv));
            }

            std::set<std::string> seen;
            for (const Contraction& ca : to_a)
                for (const Contraction& cb : to_b) {
                    if (edges_meet(ca.contracted, cb.contracted)) continue;
                    std::string sig;
                    for (const LegMap& inv : aut_inverses) {
                        std::string s = contraction_signature(ca, inv) + "|" +
                                        contraction_signature(cb, inv);
                        if (sig.empty() || s < sig) sig = std::move(s);
                    }
                    if (!seen.insert(sig).second) continue;
                    process_triple(out, D, ca, cb, A, B, mb);
                }
        }
    }
    return out;
}

std::string unit_mono_key(const KpMonomial& m) {
    std::ostringstream os;
    for (size_t v = 0; v < m.kappa.size(); ++v) {
        os << ";";
        for (const auto& [a, e] : m.kappa[v])
            if (e > 0) os << a << "^" << e << ",";
    }
    os << "|";
    for (const auto& [l, e] : m.psi)
        if (e > 0) os << l << "^" << e << ";";
    return os.str();
}

const ProdTautClass& pullback_stratum_memo(const StableGraph& A, const StableGraph& B,
                                           const KpMonomial& mb_unit) {
    static std::map<std::string, std::unique_ptr<ProdTautClass>> memo;
    static std::mutex mtx;
    KpMonomial key_mono = mb_unit;
    key_mono.coeff = 1;
    const std::string key =
        A.raw_encoding() + " ^* " + B.raw_encoding() + " # " + unit_mono_key(key_mono);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = memo.find(key);
        if (it != memo.end()) return *it->second;
    }
    auto value = std::make_unique<ProdTautClass>(pullback_stratum(A, B, key_mono));
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = memo.emplace(key, std::move(value));
    return *it->second;
}

// Monomial of mA local to vertex v of GA, written on the factor space.
KpMonomial local_monomial(const StableGraph& GA, const KpMonomial& mA, int v) {
    KpMonomial local = KpMonomial::unit(1);
    local.kappa[0] = mA.kappa[v];
    const auto& ls = GA.legs_of(v);
    for (size_t i = 0; i < ls.size(); ++i) {
        auto it = mA.psi.find(ls[i]);
        if (it != mA.psi.end() && it->second > 0) local.psi[static_cast<int>(i) + 1] = it->second;
    }
    return local;
}

bool has_local_decoration(const StableGraph& GA, const KpMonomial& mA, int v) {
    for (const auto& [a, e] : mA.kappa[v])
        if (e > 0) return true;
    for (int l : GA.legs_of(v)) {
        auto it = mA.psi.find(l);
        if (it != mA.psi.end() && it->second > 0) return true;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

ProdTautClass boundary_pullback(const StableGraph& G, const TautClass& T) {
    if (T.g() != G.genus() || T.n() != G.num_markings())
        throw std::invalid_argument("boundary_pullback: class lives on a different (g,n)");
    ProdTautClass out(G);
    for (const DecoratedStratum& t : T.terms())
        for (const KpMonomial& m : t.poly) {
            if (m.coeff == 0) continue;
            KpMonomial unit = m;
            unit.coeff = 1;
            const ProdTautClass& P = pullback_stratum_memo(G, t.graph, unit);
            for (const ProdTensorTerm& term : P.terms()) {
                ProdTensorTerm scaled = term;
                scaled.coeff *= m.coeff;
                out.add_term(std::move(scaled));
            }
        }
    return out;
}

TautClass boundary_pushforward(const StableGraph& G, const std::vector<TautClass>& factors_in) {
    const int V = G.num_vertices();
    std::vector<TautClass> factors;
    if (factors_in.empty()) {
        for (int v = 0; v < V; ++v) factors.push_back(fundclass(G.genus_of(v), G.valence(v)));
    } else {
        factors = factors_in;
    }
    if (static_cast<int>(factors.size()) != V)
        throw std::invalid_argument("boundary_pushforward: wrong number of factors");
    for (int v = 0; v < V; ++v)
        if (factors[v].g() != G.genus_of(v) || factors[v].n() != G.valence(v))
            throw std::invalid_argument("boundary_pushforward: factor " + std::to_string(v) +
                                        " lives on the wrong space");

    TautClass out(G.genus(), G.num_markings());

    struct Choice {
        const StableGraph* graph;
        const KpMonomial* mono;
    };
    std::vector<std::vector<Choice>> options(V);
    for (int v = 0; v < V; ++v) {
        for (const DecoratedStratum& t : factors[v].terms())
            for (const KpMonomial& m : t.poly) options[v].push_back({&t.graph, &m});
        if (options[v].empty()) return out;  // zero factor annihilates the product
    }

    std::vector<int> pick(V, 0);
    std::function<void(int)> rec = [&](int v) {
        if (v < V) {
            for (size_t i = 0; i < options[v].size(); ++i) {
                pick[v] = static_cast<int>(i);
                rec(v + 1);
            }
            return;
        }
        int fresh = std::max(G.max_label(), G.num_markings()) + 1;
        std::vector<int> genera;
        std::vector<std::vector<int>> legs;
        std::vector<Edge> edges = G.edges();
        std::vector<int> voffset(V);
        std::vector<LegMap> relabels(V);
        Rat coeff(1);
        for (int w = 0; w < V; ++w) {
            const Choice& ch = options[w][pick[w]];
            const StableGraph& H = *ch.graph;
            voffset[w] = static_cast<int>(genera.size());
            LegMap& relabel = relabels[w];
            const auto& gw = G.legs_of(w);
            for (int j = 1; j <= H.num_markings(); ++j) relabel[j] = gw[j - 1];
            for (int hv = 0; hv < H.num_vertices(); ++hv)
                for (int l : H.legs_of(hv))
                    if (!H.is_marking(l)) relabel[l] = fresh++;
            for (int hv = 0; hv < H.num_vertices(); ++hv) {
                genera.push_back(H.genus_of(hv));
                std::vector<int> ls;
                for (int l : H.legs_of(hv)) ls.push_back(relabel.at(l));
                legs.push_back(ls);
            }
            for (const Edge& e : H.edges())
                edges.emplace_back(relabel.at(e.first), relabel.at(e.second));
            coeff *= ch.mono->coeff;
        }
        if (coeff == 0) return;
        KpMonomial full;
        full.coeff = coeff;
        full.kappa.resize(genera.size());
        for (int w = 0; w < V; ++w) {
            const Choice& ch = options[w][pick[w]];
            for (int hv = 0; hv < ch.graph->num_vertices(); ++hv)
                for (const auto& [a, e] : ch.mono->kappa[hv])
                    if (e > 0) full.kappa[voffset[w] + hv][a] += e;
            for (const auto& [l, e] : ch.mono->psi)
                if (e > 0) full.psi[relabels[w].at(l)] += e;
        }
        out.add_term(StableGraph(genera, legs, edges), full);
    };
    rec(0);
    return out;
}

TautClass multiply(const TautClass& A, const TautClass& B) {
    if (A.g() != B.g() || A.n() != B.n())
        throw std::invalid_argument("multiply: classes live on different (g,n)");
    TautClass out(A.g(), A.n());
    const int dim = A.dim();
    for (const DecoratedStratum& ta : A.terms()) {
        for (const KpMonomial& ma : ta.poly) {
            if (ma.coeff == 0) continue;
            for (const DecoratedStratum& tb : B.terms()) {
                for (const KpMonomial& mb : tb.poly) {
                    if (mb.coeff == 0) continue;
                    if (ta.graph.num_edges() + ma.degree() + tb.graph.num_edges() + mb.degree() >
                        dim)
                        continue;
                    if (ta.graph.is_trivial() || tb.graph.is_trivial()) {
                        const bool a_triv = ta.graph.is_trivial();
                        const DecoratedStratum& strat = a_triv ? tb : ta;
                        const KpMonomial& strat_mono = a_triv ? mb : ma;
                        const KpMonomial& deco_mono = a_triv ? ma : mb;
                        TautClass single(A.g(), A.n());
                        KpMonomial sm = strat_mono;
                        sm.coeff = ma.coeff * mb.coeff;
                        single.add_term(strat.graph, sm);
                        KpMonomial deco = deco_mono;
                        deco.coeff = 1;
                        out += decorate(single, deco);
                        continue;
                    }
                    const ProdTautClass& P = pullback_stratum_memo(ta.graph, tb.graph, mb);
                    for (const ProdTensorTerm& term : P.terms()) {
                        std::vector<TautClass> factors = term.factors;
                        for (int v = 0; v < ta.graph.num_vertices(); ++v) {
                            if (!has_local_decoration(ta.graph, ma, v)) continue;
                            factors[v] = decorate(factors[v], local_monomial(ta.graph, ma, v));
                        }
                        out += boundary_pushforward(ta.graph, factors) *
                               (term.coeff * ma.coeff * mb.coeff);
                    }
                }
            }
        }
    }
    return out;
}

TautClass operator*(const TautClass& a, const TautClass& b) { return multiply(a, b); }

TautClass power(const TautClass& a, int e) {
    if (e < 0) throw std::invalid_argument("power: negative exponent");
    TautClass out = fundclass(a.g(), a.n());
    for (int i = 0; i < e; ++i) out = multiply(out, a);
    return out;
}

Rat evaluate(const TautClass& T) {
    const int dim = T.dim();
    Rat total(0);
    for (const DecoratedStratum& t : T.terms()) {
        for (const KpMonomial& m : t.poly) {
            if (m.coeff == 0) continue;
            if (t.graph.num_edges() + m.degree() != dim) continue;
            Rat prod = m.coeff;
            for (int v = 0; v < t.graph.num_vertices() && prod != 0; ++v) {
                std::vector<int> parts;
                for (const auto& [a, e] : m.kappa[v])
                    for (int i = 0; i < e; ++i) parts.push_back(a);
                std::vector<int> exps;
                for (int l : t.graph.legs_of(v)) {
                    auto it = m.psi.find(l);
                    exps.push_back(it == m.psi.end() ? 0 : it->second);
                }
                prod *= kappa_psi_integral(t.graph.genus_of(v), parts, exps);
            }
            total += prod;
        }
    }
    total.canonicalize();
    return total;
}

Rat pair_eval(const StableGraph& Ga, const KpMonomial& ma, const StableGraph& Gb,
              const KpMonomial& mb) {
    const int g = Ga.genus(), n = Ga.num_markings();
    const int dim = 3 * g - 3 + n;
    if (Ga.num_edges() + ma.degree() + Gb.num_edges() + mb.degree() != dim) return 0;

    static std::map<std::string, Rat> memo;
    static std::mutex mtx;
    KpMonomial ua = ma, ub = mb;
    ua.coeff = 1;
    ub.coeff = 1;
    const std::string key =
        canonical_decoration(Ga, ua).key + " . " + canonical_decoration(Gb, ub).key;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second * ma.coeff * mb.coeff;
    }
    TautClass A(g, n), B(g, n);
    A.add_term(Ga, ua);
    B.add_term(Gb, ub);
    Rat value = evaluate(multiply(A, B));
    {
        std::lock_guard<std::mutex> lock(mtx);
        memo.emplace(key, value);
    }
    return value * ma.coeff * mb.coeff;
}

// ---------------------------------------------------------------------------
// Forgetful maps
// ---------------------------------------------------------------------------

namespace {

TautClass forget_one(const TautClass& T, int mark) {
    const int g = T.g(), n = T.n();
    if (2 * g - 2 + (n - 1) <= 0)
        throw std::invalid_argument("forgetful_pushforward: target space is unstable");
    TautClass out(g, n - 1);
    // Markings above the forgotten one close ranks; half-edge labels are
    // all > n, so they never collide with the shifted markings.
    auto relab = [&](int l) { return (l > mark && l <= n) ? l - 1 : l; };

    for (const DecoratedStratum& t : T.terms()) {
        const StableGraph& G = t.graph;
        const int v = G.vertex_of(mark);
        const bool dies = (G.genus_of(v) == 0 && G.valence(v) == 3);

        auto genera = G.genera();
        std::vector<std::vector<int>> legs = G.legs();
        legs[v].erase(std::remove(legs[v].begin(), legs[v].end(), mark), legs[v].end());
        for (auto& ls : legs)
            for (int& l : ls) l = relab(l);

        // Built lazily: the target graph for the generic (non-dying) case.
        std::unique_ptr<StableGraph> G1;
        if (!dies) G1 = std::make_unique<StableGraph>(genera, legs, G.edges());

        for (const KpMonomial& m : t.poly) {
            if (m.coeff == 0) continue;

            if (dies) {
                // The three-pointed genus-0 vertex collapses; any positive
                // decoration on it was the zero class to begin with.
                if (vertex_decoration_degree(G, m, v) > 0) continue;
                auto [SG, reloc] = stabilize(genera, legs, G.edges());
                KpMonomial mm = KpMonomial::unit(SG.num_vertices(), m.coeff);
                bool dead = false;
                for (int u = 0; u < G.num_vertices() && !dead; ++u) {
                    if (u == v) continue;
                    bool any = false;
                    for (const auto& [a, e] : m.kappa[u])
                        if (e > 0) any = true;
                    if (!any) continue;
                    int image = -1;
                    for (int l : G.legs_of(u)) {
                        auto it = reloc.find(relab(l));
                        if (it != reloc.end()) {
                            image = SG.vertex_of(it->second);
                            break;
                        }
                    }
                    if (image == -1) {
                        dead = true;
                        break;
                    }
                    for (const auto& [a, e] : m.kappa[u])
                        if (e > 0) mm.kappa[image][a] += e;
                }
                for (const auto& [l, e] : m.psi) {
                    if (dead) break;
                    if (e == 0) continue;
                    auto it = reloc.find(relab(l));
                    if (it == reloc.end()) {
                        dead = true;
                        break;
                    }
                    mm.psi[it->second] += e;
                }
                if (dead) continue;
                if (!exceeds_vertex_dim(SG, mm)) out.add_term(SG, mm);
                continue;
            }

            auto it_m = m.psi.find(mark);
            const int b_m = it_m == m.psi.end() ? 0 : it_m->second;
            const int kappa0 = 2 * G.genus_of(v) - 2 + G.valence(v) - 1;

            // No-diagonal terms: each kappa_a^e at v splits off psi_mark^a
            // parts; the total psi_mark power C pushes to kappa_{C-1}.
            std::vector<std::pair<int, int>> kv(m.kappa[v].begin(), m.kappa[v].end());
            std::function<void(size_t, int, Rat, std::map<int, int>)> rec =
                [&](size_t idx, int extra, Rat coeff, std::map<int, int> kept) {
                    if (idx == kv.size()) {
                        const int C = b_m + extra;
                        if (C == 0) return;
                        KpMonomial nm = KpMonomial::unit(G1->num_vertices(), m.coeff * coeff);
                        for (int u = 0; u < G.num_vertices(); ++u)
                            if (u != v) nm.kappa[u] = m.kappa[u];
                        nm.kappa[v] = kept;
                        if (C == 1)
                            nm.coeff *= kappa0;
                        else
                            nm.kappa[v][C - 1] += 1;
                        if (nm.coeff == 0) return;
                        for (const auto& [l, e] : m.psi)
                            if (l != mark && e > 0) nm.psi[relab(l)] = e;
                        nm.cleanup();
                        if (!exceeds_vertex_dim(*G1, nm)) out.add_term(*G1, nm);
                        return;
                    }
                    auto [a, e] = kv[idx];
                    for (int s = 0; s <= e; ++s) {
                        auto kept2 = kept;
                        if (e - s > 0) kept2[a] = e - s;
                        rec(idx + 1, extra + a * s, coeff * Rat(binomial(e, s)), kept2);
                    }
                };
            rec(0, 0, Rat(1), {});

            // Diagonal terms: psi_j^{b_j} contributes psi_j^{b_j-1} when the
            // forgotten point collides with leg j (only when psi_mark absent).
            if (b_m == 0) {
                for (int j : G.legs_of(v)) {
                    if (j == mark) continue;
                    auto it_j = m.psi.find(j);
                    if (it_j == m.psi.end() || it_j->second == 0) continue;
                    KpMonomial nm = KpMonomial::unit(G1->num_vertices(), m.coeff);
                    for (int u = 0; u < G.num_vertices(); ++u) nm.kappa[u] = m.kappa[u];
                    for (const auto& [l, e] : m.psi)
                        if (e > 0) nm.psi[relab(l)] = e;
                    nm.psi[relab(j)] -= 1;
                    nm.cleanup();
                    if (!exceeds_vertex_dim(*G1, nm)) out.add_term(*G1, nm);
                }
            }
        }
    }
    return out;
}

}  // namespace

TautClass forgetful_pushforward(const TautClass& T, const std::vector<int>& markings) {
    for (int m : markings)
        if (m < 1 || m > T.n())
            throw std::invalid_argument("forgetful_pushforward: marking out of range");
    std::vector<int> ms = markings;
    std::sort(ms.rbegin(), ms.rend());
    if (std::adjacent_find(ms.begin(), ms.end()) != ms.end())
        throw std::invalid_argument("forgetful_pushforward: repeated marking");
    TautClass cur = T;
    for (int m : ms) cur = forget_one(cur, m);
    return cur;
}

TautClass forgetful_pullback(const TautClass& T, int k) {
    if (k < 0) throw std::invalid_argument("forgetful_pullback: negative count");
    TautClass cur = T;
    for (int step = 0; step < k; ++step) {
        const int g = cur.g(), n = cur.n();
        const int mark = n + 1;
        TautClass next(g, n + 1);
        for (const DecoratedStratum& t : cur.terms()) {
            // Shift half-edge labels up by one so the new marking label is free.
            const StableGraph& G0 = t.graph;
            auto bump = [&](int l) { return G0.is_marking(l) ? l : l + 1; };
            std::vector<std::vector<int>> legs0 = G0.legs();
            for (auto& ls : legs0)
                for (int& l : ls) l = bump(l);
            std::vector<Edge> edges0;
            for (const Edge& e : G0.edges()) edges0.emplace_back(bump(e.first), bump(e.second));

            for (const KpMonomial& m0 : t.poly) {
                if (m0.coeff == 0) continue;
                KpMonomial m = m0;
                {
                    std::map<int, int> psi;
                    for (const auto& [l, e] : m0.psi)
                        if (e > 0) psi[bump(l)] = e;
                    m.psi = std::move(psi);
                }
                for (int v = 0; v < G0.num_vertices(); ++v) {
                    auto legs = legs0;
                    legs[v].push_back(mark);
                    StableGraph Gv(G0.genera(), legs, edges0);

                    // No-diagonal terms: expand (kappa_a - psi_mark^a)^e at v.
                    std::vector<std::pair<int, int>> kv(m.kappa[v].begin(), m.kappa[v].end());
                    std::function<void(size_t, int, Rat, std::map<int, int>)> rec =
                        [&](size_t idx, int extra, Rat coeff, std::map<int, int> kept) {
                            if (idx == kv.size()) {
                                KpMonomial nm = m;
                                nm.coeff = m.coeff * coeff;
                                if (nm.coeff == 0) return;
                                nm.kappa[v] = kept;
                                if (extra > 0) nm.psi[mark] = extra;
                                nm.cleanup();
                                if (!exceeds_vertex_dim(Gv, nm)) next.add_term(Gv, nm);
                                return;
                            }
                            auto [a, e] = kv[idx];
                            for (int s = 0; s <= e; ++s) {
                                auto kept2 = kept;
                                if (e - s > 0) kept2[a] = e - s;
                                Rat sign = (s % 2 == 0) ? Rat(1) : Rat(-1);
                                rec(idx + 1, extra + a * s, coeff * sign * Rat(binomial(e, s)),
                                    kept2);
                            }
                        };
                    rec(0, 0, Rat(1), {});

                    // Diagonal terms: -[bubble at leg j] with psi_h^{b_j-1}.
                    for (int j0 : G0.legs_of(v)) {
                        const int j = bump(j0);
                        auto it_j = m.psi.find(j);
                        if (it_j == m.psi.end() || it_j->second == 0) continue;
                        const int bj = it_j->second;
                        int fresh = mark;
                        for (const auto& ls : legs0)
                            for (int l : ls) fresh = std::max(fresh, l);
                        fresh += 1;
                        const int p = fresh, pp = fresh + 1;
                        auto legs = legs0;
                        for (int& l : legs[v])
                            if (l == j) l = p;
                        legs.push_back({j, mark, pp});
                        auto genera = G0.genera();
                        genera.push_back(0);
                        auto edges = edges0;
                        edges.emplace_back(p, pp);
                        StableGraph Gb(genera, legs, edges);

                        KpMonomial nm = KpMonomial::unit(Gb.num_vertices(), -m.coeff);
                        for (int u = 0; u < G0.num_vertices(); ++u) nm.kappa[u] = m.kappa[u];
                        for (const auto& [l, e] : m.psi) {
                            if (l == j || e == 0) continue;
                            nm.psi[l] = e;
                        }
                        if (bj - 1 > 0) nm.psi[p] = bj - 1;
                        if (!exceeds_vertex_dim(Gb, nm)) next.add_term(Gb, nm);
                    }
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace tautring
