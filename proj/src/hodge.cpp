#include "tautring/hodge.hpp"

#include "tautring/calculus.hpp"
#include "tautring/graph_enum.hpp"

namespace tautring {

namespace {

// ch_{2l-1} via Mumford's Grothendieck-Riemann-Roch expression. The boundary
// sum runs over isomorphism classes of (one-edge graph, ordered branches);
// a graph contributes once when some automorphism swaps the branches of its
// edge and twice otherwise, with a global 1/2.
TautClass ch_odd(int g, int n, int l) {
    const int d = 2 * l - 1;
    TautClass out = kappaclass(d, g, n);
    for (int i = 1; i <= n; ++i) {
        StableGraph triv = StableGraph::trivial(g, n);
        KpMonomial m = KpMonomial::unit(1, Rat(-1));
        m.psi[i] = d;
        out.add_term(triv, m);
    }
    if (3 * g - 3 + n >= 1) {
        for (const StableGraph& G : stable_graphs(g, n, 1)) {
            const Edge e = G.edges()[0];
            bool swap_exists = false;
            for (const LegMap& aut : G.canonical_form().automorphisms)
                if (aut.at(e.first) == e.second) swap_exists = true;
            const Rat weight = swap_exists ? Rat(1, 2) : Rat(1);
            for (int a = 0; a <= 2 * l - 2; ++a) {
                const int b = 2 * l - 2 - a;
                KpMonomial m = KpMonomial::unit(G.num_vertices(),
                                                (a % 2 == 0 ? weight : -weight));
                if (a > 0) m.psi[e.first] = a;
                if (b > 0) m.psi[e.second] += b;
                if (exceeds_vertex_dim(G, m)) continue;
                out.add_term(G, m);
            }
        }
    }
    out *= bernoulli(2 * l) / Rat(factorial(2 * l));
    return out.simplified();
}

}  // namespace

ChernCharacter hodge_chern_character(int g, int n, int maxdeg) {
    if (2 * g - 2 + n <= 0) throw std::invalid_argument("hodge_chern_character: unstable (g,n)");
    ChernCharacter cc;
    cc.g = g;
    cc.n = n;
    for (int l = 1; l <= maxdeg; ++l) {
        if (l % 2 == 1)
            cc.components.push_back(ch_odd(g, n, (l + 1) / 2));
        else
            cc.components.push_back(TautClass(g, n));  // ch_even = 0
    }
    return cc;
}

TautClass lambdaclass(int d, int g, int n) {
    if (d < 0) throw std::invalid_argument("lambdaclass: negative degree");
    if (d == 0) return fundclass(g, n);
    if (d > 3 * g - 3 + n) return TautClass(g, n);  // above the dimension

    ChernCharacter cc = hodge_chern_character(g, n, d);
    // log c(E) = sum_l (-1)^{l-1} (l-1)! ch_l; exponentiate and truncate.
    TautClass log_c(g, n);
    for (int l = 1; l <= d; ++l) {
        Rat coeff = Rat(factorial(l - 1)) * (l % 2 == 1 ? 1 : -1);
        log_c += cc.ch(l) * coeff;
    }
    TautClass total = fundclass(g, n);
    TautClass term = fundclass(g, n);
    for (int k = 1; k <= d; ++k) {
        term = multiply(term, log_c) * Rat(1, k);
        TautClass truncated(g, n);
        for (int r = 0; r <= d; ++r) truncated += term.degree_part(r);
        term = truncated.simplified();
        total += term;
    }
    return total.degree_part(d).simplified();
}

}  // namespace tautring
