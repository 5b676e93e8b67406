#include "tautring/taut_class.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "tautring/graph_enum.hpp"

namespace tautring {

namespace {

void check_same_space(const TautClass& a, const TautClass& b) {
    if (a.g() != b.g() || a.n() != b.n())
        throw std::invalid_argument("tautological classes live on different (g,n)");
}

}  // namespace

TautClass& TautClass::operator+=(const TautClass& o) {
    check_same_space(*this, o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

TautClass& TautClass::operator-=(const TautClass& o) {
    check_same_space(*this, o);
    for (const DecoratedStratum& t : o.terms_) {
        DecoratedStratum neg = t;
        for (KpMonomial& m : neg.poly) m.coeff = -m.coeff;
        terms_.push_back(std::move(neg));
    }
    return *this;
}

TautClass& TautClass::operator*=(const Rat& c) {
    for (DecoratedStratum& t : terms_)
        for (KpMonomial& m : t.poly) {
            m.coeff *= c;
            m.coeff.canonicalize();
        }
    return *this;
}

TautClass TautClass::operator-() const {
    TautClass r = *this;
    r *= Rat(-1);
    return r;
}

TautClass operator+(TautClass a, const TautClass& b) { return a += b; }
TautClass operator-(TautClass a, const TautClass& b) { return a -= b; }
TautClass operator*(TautClass a, const Rat& c) { return a *= c; }
TautClass operator*(const Rat& c, TautClass a) { return a *= c; }

TautClass TautClass::degree_part(int r) const {
    TautClass out(g_, n_);
    for (const DecoratedStratum& t : terms_) {
        std::vector<KpMonomial> keep;
        for (const KpMonomial& m : t.poly)
            if (t.graph.num_edges() + m.degree() == r) keep.push_back(m);
        if (!keep.empty()) out.add_term(DecoratedStratum(t.graph, std::move(keep)));
    }
    return out;
}

std::set<int> TautClass::degrees() const {
    std::set<int> ds;
    for (const DecoratedStratum& t : terms_)
        for (const KpMonomial& m : t.poly)
            if (m.coeff != 0) ds.insert(t.graph.num_edges() + m.degree());
    return ds;
}

TautClass TautClass::simplified() const {
    struct Bucket {
        StableGraph graph;
        KpMonomial mono;
        Rat coeff;
        Bucket(StableGraph g, KpMonomial m, Rat c)
            : graph(std::move(g)), mono(std::move(m)), coeff(std::move(c)) {}
    };
    std::map<std::string, Bucket> buckets;
    for (const DecoratedStratum& t : terms_) {
        if (t.graph.num_edges() > dim()) continue;
        for (const KpMonomial& m : t.poly) {
            if (m.coeff == 0) continue;
            if (exceeds_vertex_dim(t.graph, m)) continue;
            CanonicalDecoration cd = canonical_decoration(t.graph, m);
            auto it = buckets.find(cd.key);
            if (it == buckets.end()) {
                StableGraph rep = canonical_representative(t.graph);
                KpMonomial mono = cd.mono;
                Rat c = mono.coeff;
                mono.coeff = 1;
                mono.cleanup();
                buckets.emplace(cd.key, Bucket(std::move(rep), std::move(mono), c));
            } else {
                it->second.coeff += m.coeff;
            }
        }
    }

    // Deterministic order: graphs in documented order, then decoration order.
    std::vector<const Bucket*> nonzero;
    for (auto& [key, b] : buckets) {
        b.coeff.canonicalize();
        if (b.coeff != 0) nonzero.push_back(&b);
    }
    std::sort(nonzero.begin(), nonzero.end(), [](const Bucket* a, const Bucket* b) {
        if (!(a->graph == b->graph)) {
            if (graph_order_less(a->graph, b->graph)) return true;
            if (graph_order_less(b->graph, a->graph)) return false;
            // Isomorphic graphs always share the canonical representative.
        }
        return decoration_less(a->graph, a->mono, b->mono);
    });

    TautClass out(g_, n_);
    // Merge consecutive monomials on the same graph into one stratum.
    for (const Bucket* b : nonzero) {
        KpMonomial m = b->mono;
        m.coeff = b->coeff;
        if (!out.terms_.empty() && out.terms_.back().graph == b->graph)
            out.terms_.back().poly.push_back(std::move(m));
        else
            out.add_term(b->graph, m);
    }
    return out;
}

std::string TautClass::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const DecoratedStratum& t : terms_) {
        if (!first) os << "\n\n";
        first = false;
        os << "Graph :      " << t.graph.to_string() << "\n";
        os << "Polynomial : ";
        for (size_t i = 0; i < t.poly.size(); ++i) {
            if (i) os << " + ";
            os << mono_to_string(t.poly[i]);
        }
    }
    return os.str();
}

TautClass fundclass(int g, int n) {
    StableGraph G = StableGraph::trivial(g, n);
    TautClass c(g, n);
    c.add_term(G, KpMonomial::unit(1));
    return c;
}

TautClass psiclass(int i, int g, int n) {
    if (i < 1 || i > n)
        throw std::invalid_argument("psiclass: marking " + std::to_string(i) +
                                    " out of range 1.." + std::to_string(n));
    StableGraph G = StableGraph::trivial(g, n);
    KpMonomial m = KpMonomial::unit(1);
    m.psi[i] = 1;
    TautClass c(g, n);
    c.add_term(G, m);
    return c;
}

TautClass kappaclass(int a, int g, int n) {
    if (a < 0) throw std::invalid_argument("kappaclass: negative degree");
    if (a == 0) return fundclass(g, n) * Rat(2 * g - 2 + n);
    StableGraph G = StableGraph::trivial(g, n);
    KpMonomial m = KpMonomial::unit(1);
    m.kappa[0][a] = 1;
    TautClass c(g, n);
    c.add_term(G, m);
    return c;
}

TautClass sepbdiv(int h, const std::set<int>& A, int g, int n) {
    if (h < 0 || h > g) throw std::invalid_argument("sepbdiv: side genus out of range");
    std::vector<int> side1(A.begin(), A.end());
    std::vector<int> side2;
    for (int i = 1; i <= n; ++i)
        if (!A.count(i)) side2.push_back(i);
    if (!side1.empty() && (side1.front() < 1 || side1.back() > n))
        throw std::invalid_argument("sepbdiv: marking subset out of range");
    side1.push_back(n + 1);
    side2.push_back(n + 2);
    StableGraph G({h, g - h}, {side1, side2}, {{n + 1, n + 2}});
    TautClass c(g, n);
    c.add_term(G, KpMonomial::unit(2));
    return c;
}

TautClass irrbdiv(int g, int n) {
    if (g < 1) throw std::invalid_argument("irrbdiv: needs g >= 1");
    std::vector<int> legs(n);
    std::iota(legs.begin(), legs.end(), 1);
    legs.push_back(n + 1);
    legs.push_back(n + 2);
    StableGraph G({g - 1}, {legs}, {{n + 1, n + 2}});
    TautClass c(g, n);
    c.add_term(G, KpMonomial::unit(1));
    return c;
}

TautClass graph_to_class(const StableGraph& G) {
    TautClass c(G.genus(), G.num_markings());
    c.add_term(G, KpMonomial::unit(G.num_vertices()));
    return c;
}

namespace {

// All kappa-psi monomials of the given decoration degree on G, subject to the
// per-vertex dimension bound.
std::vector<KpMonomial> decorations_of_degree(const StableGraph& G, int degree) {
    const int V = G.num_vertices();

    // Per-vertex monomial options per degree: (kappa partition, psi exponents).
    // kappa partitions enumerated as multisets of parts >= 1.
    std::vector<std::vector<std::vector<KpMonomial>>> vertex_options(V);
    for (int v = 0; v < V; ++v) {
        const int cap = std::min(degree, G.vertex_dim(v));
        vertex_options[v].resize(cap + 1);
        const std::vector<int>& ls = G.legs_of(v);
        for (int d = 0; d <= cap; ++d) {
            for (int kdeg = 0; kdeg <= d; ++kdeg) {
                // partitions of kdeg
                std::vector<std::vector<int>> parts_list;
                std::vector<int> cur;
                std::function<void(int, int)> rec = [&](int rem, int maxpart) {
                    if (rem == 0) {
                        parts_list.push_back(cur);
                        return;
                    }
                    for (int p = std::min(rem, maxpart); p >= 1; --p) {
                        cur.push_back(p);
                        rec(rem - p, p);
                        cur.pop_back();
                    }
                };
                rec(kdeg, kdeg);
                // weak compositions of d - kdeg over the legs of v
                const int pd = d - kdeg;
                std::vector<std::vector<int>> psi_list;
                std::vector<int> comp(ls.size(), 0);
                std::function<void(int, int)> prec = [&](int idx, int rem) {
                    if (idx == static_cast<int>(ls.size())) {
                        if (rem == 0) psi_list.push_back(comp);
                        return;
                    }
                    for (int e = 0; e <= rem; ++e) {
                        comp[idx] = e;
                        prec(idx + 1, rem - e);
                    }
                    comp[idx] = 0;
                };
                if (ls.empty()) {
                    if (pd == 0) psi_list.push_back({});
                } else {
                    prec(0, pd);
                }
                for (const auto& parts : parts_list)
                    for (const auto& psis : psi_list) {
                        KpMonomial m = KpMonomial::unit(V);
                        for (int p : parts) m.kappa[v][p] += 1;
                        for (size_t i = 0; i < ls.size(); ++i)
                            if (psis.size() > i && psis[i] > 0) m.psi[ls[i]] = psis[i];
                        vertex_options[v][d].push_back(m);
                    }
            }
        }
    }

    // Combine across vertices over all degree splits.
    std::vector<KpMonomial> result;
    std::function<void(int, int, const KpMonomial&)> combine = [&](int v, int rem,
                                                                   const KpMonomial& acc) {
        if (v == V) {
            if (rem == 0) result.push_back(acc);
            return;
        }
        const int cap = std::min(rem, static_cast<int>(vertex_options[v].size()) - 1);
        for (int d = 0; d <= cap; ++d)
            for (const KpMonomial& opt : vertex_options[v][d]) combine(v + 1, rem - d, mono_mul(acc, opt));
    };
    combine(0, degree, KpMonomial::unit(V));
    return result;
}

}  // namespace

const GeneratorList& generator_list(int g, int n, int r) {
    static std::map<std::tuple<int, int, int>, std::unique_ptr<GeneratorList>> registry;
    static std::mutex mtx;
    const auto key = std::make_tuple(g, n, r);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = registry.find(key);
        if (it != registry.end()) return *it->second;
    }

    auto out = std::make_unique<GeneratorList>();
    out->g = g;
    out->n = n;
    out->r = r;
    if (r < 0 || r > 3 * g - 3 + n) {
        // empty
    } else {
        for (int e = 0; e <= r; ++e) {
            for (const StableGraph& G : stable_graphs(g, n, e)) {
                // Group isomorphic decorations, keep the order-least member.
                std::map<std::string, KpMonomial> reps;
                for (const KpMonomial& m : decorations_of_degree(G, r - e)) {
                    CanonicalDecoration cd = canonical_decoration(G, m);
                    auto it = reps.find(cd.key);
                    if (it == reps.end())
                        reps.emplace(cd.key, m);
                    else if (decoration_less(G, m, it->second))
                        it->second = m;
                }
                std::vector<std::pair<KpMonomial, std::string>> ordered;
                for (auto& [k, m] : reps) ordered.emplace_back(m, k);
                std::sort(ordered.begin(), ordered.end(),
                          [&](const auto& a, const auto& b) {
                              return decoration_less(G, a.first, b.first);
                          });
                for (auto& [m, k] : ordered) {
                    out->strata.emplace_back(G, std::vector<KpMonomial>{m});
                    out->keys.push_back(k);
                }
            }
        }
    }

    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = registry.emplace(key, std::move(out));
    return *it->second;
}

std::vector<TautClass> tautgens(int g, int n, int r, Moduli moduli) {
    const GeneratorList& gl = generator_list(g, n, r);
    std::vector<TautClass> out;
    for (const DecoratedStratum& s : gl.strata) {
        if (!s.graph.moduli_allows(moduli)) continue;
        TautClass c(g, n);
        c.add_term(s);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace tautring
