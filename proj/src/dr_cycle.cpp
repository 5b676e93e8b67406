#include "tautring/dr_cycle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "tautring/graph_enum.hpp"

namespace tautring {

std::vector<Weighting> enumerate_weightings(const StableGraph& G, int r,
                                            const std::vector<int>& A) {
    if (r < 1) throw std::invalid_argument("enumerate_weightings: modulus must be >= 1");
    if (static_cast<int>(A.size()) != G.num_markings())
        throw std::invalid_argument("enumerate_weightings: wrong leg vector length");
    long asum = std::accumulate(A.begin(), A.end(), 0L);
    if (asum != 0) throw std::invalid_argument("enumerate_weightings: leg values must sum to 0");

    const int E = G.num_edges();
    std::vector<Weighting> out;
    std::vector<int> choice(E, 0);

    auto vertex_sums_ok = [&]() {
        for (int v = 0; v < G.num_vertices(); ++v) {
            long s = 0;
            for (int l : G.legs_of(v)) {
                if (G.is_marking(l)) {
                    s += ((A[l - 1] % r) + r) % r;
                } else {
                    // value determined by the edge choice below
                }
            }
            for (int i = 0; i < E; ++i) {
                const Edge& e = G.edges()[i];
                if (G.vertex_of(e.first) == v) s += choice[i];
                if (G.vertex_of(e.second) == v) s += (r - choice[i]) % r;
            }
            if (s % r != 0) return false;
        }
        return true;
    };

    std::function<void(int)> rec = [&](int i) {
        if (i == E) {
            if (!vertex_sums_ok()) return;
            Weighting w;
            for (int j = 0; j < E; ++j) {
                const Edge& e = G.edges()[j];
                w.w[e.first] = choice[j];
                w.w[e.second] = (r - choice[j]) % r;
            }
            out.push_back(std::move(w));
            return;
        }
        for (int t = 0; t < r; ++t) {
            choice[i] = t;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

namespace {

// Expands the Pixton integrand on (G, w) into monomials of decoration degree
// exactly `target`, appending them (times `scale`) to out.
void expand_integrand(const StableGraph& G, const std::vector<int>& A, const Weighting& w,
                      int target, const Rat& scale, std::vector<KpMonomial>& out) {
    struct LegSeries {
        int leg;
        Rat u;  // exp(u * psi): term k has coefficient u^k / k!
    };
    std::vector<LegSeries> legs;
    for (int i = 1; i <= G.num_markings(); ++i) {
        if (A[i - 1] == 0) continue;
        legs.push_back({i, Rat(static_cast<long>(A[i - 1]) * A[i - 1], 2)});
    }

    std::vector<KpMonomial> acc = {KpMonomial::unit(G.num_vertices(), scale)};

    for (const LegSeries& ls : legs) {
        std::vector<KpMonomial> next;
        for (const KpMonomial& m : acc) {
            Rat uk(1);
            for (int k = 0; k + m.degree() <= target; ++k) {
                KpMonomial t = m;
                t.coeff *= uk / Rat(factorial(k));
                if (k > 0) t.psi[ls.leg] += k;
                if (!exceeds_vertex_dim(G, t)) next.push_back(std::move(t));
                uk *= ls.u;
            }
        }
        acc = std::move(next);
    }

    for (const Edge& e : G.edges()) {
        const long wh = w.w.at(e.first), wph = w.w.at(e.second);
        const Rat u(wh * wph, 2);
        std::vector<KpMonomial> next;
        for (const KpMonomial& m : acc) {
            // (1 - exp(-u(x+y)))/(x+y) = sum_{k>=1} (-1)^{k-1} u^k (x+y)^{k-1} / k!
            Rat uk = u;
            for (int k = 1; k - 1 + m.degree() <= target; ++k) {
                const Rat base = uk / Rat(factorial(k)) * ((k - 1) % 2 == 0 ? 1 : -1);
                for (int alpha = 0; alpha <= k - 1; ++alpha) {
                    KpMonomial t = m;
                    t.coeff *= base * Rat(binomial(k - 1, alpha));
                    if (alpha > 0) t.psi[e.first] += alpha;
                    if (k - 1 - alpha > 0) t.psi[e.second] += k - 1 - alpha;
                    if (!exceeds_vertex_dim(G, t)) next.push_back(std::move(t));
                }
                uk *= u;
            }
        }
        acc = std::move(next);
    }

    for (KpMonomial& m : acc) {
        if (m.coeff == 0) continue;
        if (m.degree() != target) continue;
        out.push_back(std::move(m));
    }
}

}  // namespace

TautClass pixton_class_at_r(int g, const std::vector<int>& A, int d, int r) {
    const int n = static_cast<int>(A.size());
    if (r < 1) throw std::invalid_argument("pixton_class_at_r: modulus must be >= 1");
    if (2 * g - 2 + n <= 0) throw std::invalid_argument("pixton_class_at_r: unstable (g,n)");
    long asum = std::accumulate(A.begin(), A.end(), 0L);
    if (asum != 0) throw std::invalid_argument("pixton_class_at_r: leg values must sum to 0");

    TautClass out(g, n);
    const int emax = std::min(d, 3 * g - 3 + n);
    for (int e = 0; e <= emax; ++e) {
        for (const StableGraph& G : stable_graphs(g, n, e)) {
            Rat scale(1);
            for (int i = 0; i < G.h1(); ++i) scale /= r;
            std::vector<KpMonomial> monos;
            for (const Weighting& w : enumerate_weightings(G, r, A))
                expand_integrand(G, A, w, d - e, scale, monos);
            for (KpMonomial& m : monos) out.add_term(G, m);
        }
    }
    return out.simplified();
}

Rat RatPoly::at(const Rat& x) const {
    Rat v(0);
    for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    v.canonicalize();
    return v;
}

void RatPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

std::string RatPoly::to_string() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) os << " + ";
        os << rat_to_string(c[i]);
        if (i == 1) os << "*r";
        if (i > 1) os << "*r^" << i;
    }
    return os.str();
}

TautClass RPolyTautClass::at(const Rat& r) const {
    TautClass out(g, n);
    for (const auto& [stratum, poly] : terms) {
        Rat v = poly.at(r);
        if (v == 0) continue;
        KpMonomial m = stratum.poly.front();
        m.coeff = v;
        out.add_term(stratum.graph, m);
    }
    return out;
}

std::string RPolyTautClass::to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [stratum, poly] : terms) {
        if (!first) os << "\n\n";
        first = false;
        os << "Graph :      " << stratum.graph.to_string() << "\n";
        os << "Polynomial : (" << poly.to_string() << ") * " << mono_to_string(stratum.poly.front());
    }
    return os.str();
}

namespace {

// Lagrange interpolation through (points[i], values[i]).
RatPoly interpolate(const std::vector<int>& points, const std::vector<Rat>& values) {
    const size_t N = points.size();
    RatPoly result;
    result.c.assign(N, Rat(0));
    for (size_t i = 0; i < N; ++i) {
        // Basis polynomial prod_{j != i} (r - x_j) / (x_i - x_j).
        std::vector<Rat> basis = {Rat(1)};
        Rat denom(1);
        for (size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            std::vector<Rat> next(basis.size() + 1, Rat(0));
            for (size_t t = 0; t < basis.size(); ++t) {
                next[t + 1] += basis[t];
                next[t] -= basis[t] * points[j];
            }
            basis = std::move(next);
            denom *= Rat(points[i] - points[j]);
        }
        Rat w = values[i] / denom;
        for (size_t t = 0; t < basis.size(); ++t) result.c[t] += basis[t] * w;
    }
    for (Rat& x : result.c) x.canonicalize();
    result.trim();
    return result;
}

RPolyTautClass dr_rpoly_impl(int g, const std::vector<int>& A, int d) {
    const int n = static_cast<int>(A.size());
    if (d < 0) d = g;
    long asum = std::accumulate(A.begin(), A.end(), 0L);
    if (asum != 0) throw std::invalid_argument("DR_cycle: leg values must sum to 0 for k = 0");

    // Coefficients of the mod-r class are polynomials in r of degree at most
    // 2d; sample generously and keep one extra point as a verification check.
    const int degree_bound = 2 * d + 2;
    long abs_sum = 0;
    for (int a : A) abs_sum += std::abs(a);
    const int r0 = static_cast<int>(std::max<long>(2, abs_sum + 2));
    std::vector<int> samples;
    for (int i = 0; i <= degree_bound + 1; ++i) samples.push_back(r0 + i);

    // Evaluate the class at each sample modulus.
    struct Row {
        DecoratedStratum stratum;  // unit coefficient
        std::vector<Rat> values;
        Row(DecoratedStratum s, size_t m) : stratum(std::move(s)), values(m, Rat(0)) {}
    };
    std::map<std::string, Row> rows;
    for (size_t si = 0; si < samples.size(); ++si) {
        TautClass P = pixton_class_at_r(g, A, d, samples[si]);
        for (const DecoratedStratum& t : P.terms()) {
            for (const KpMonomial& m : t.poly) {
                CanonicalDecoration cd = canonical_decoration(t.graph, m);
                auto it = rows.find(cd.key);
                if (it == rows.end()) {
                    KpMonomial unit = cd.mono;
                    unit.coeff = 1;
                    StableGraph rep = canonical_representative(t.graph);
                    it = rows.emplace(cd.key,
                                      Row(DecoratedStratum(rep, {unit}), samples.size()))
                             .first;
                }
                it->second.values[si] += m.coeff;
            }
        }
    }

    Rat two_pow_d(1);
    for (int i = 0; i < d; ++i) two_pow_d /= 2;

    RPolyTautClass out;
    out.g = g;
    out.n = n;
    std::vector<int> fit_points(samples.begin(), samples.end() - 1);
    for (auto& [key, row] : rows) {
        std::vector<Rat> fit_values(row.values.begin(), row.values.end() - 1);
        RatPoly poly = interpolate(fit_points, fit_values);
        if (poly.at(samples.back()) != row.values.back())
            throw std::runtime_error(
                "DR_cycle: interpolation unstable (degree bound exceeded at verification "
                "sample)");
        for (Rat& c : poly.c) {
            c *= two_pow_d;
            c.canonicalize();
        }
        poly.trim();
        if (!poly.c.empty()) out.terms.emplace_back(row.stratum, poly);
    }
    return out;
}

}  // namespace

TautClass DR_cycle(int g, const std::vector<int>& A, int d) {
    RPolyTautClass poly = dr_rpoly_impl(g, A, d);
    return poly.at(Rat(0)).simplified();
}

RPolyTautClass DR_cycle_rpoly(int g, const std::vector<int>& A, int d) {
    return dr_rpoly_impl(g, A, d);
}

}  // namespace tautring
