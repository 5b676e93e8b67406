#pragma once

#include <map>
#include <string>
#include <vector>

#include "tautring/rational.hpp"
#include "tautring/stable_graph.hpp"

namespace tautring {

// A single monomial c * prod_v (kappa_a^e)_v * prod_l psi_l^e living on a
// fixed stable graph. kappa_0 never appears (it is folded into the
// coefficient as the scalar 2g-2+n at creation time).
struct KpMonomial {
    Rat coeff = 0;
    std::vector<std::map<int, int>> kappa;  // per vertex: a -> exponent, a >= 1
    std::map<int, int> psi;                 // leg label -> exponent >= 1

    static KpMonomial unit(int num_vertices, const Rat& c = Rat(1));

    int degree() const;
    bool decorations_equal(const KpMonomial& o) const {
        return kappa == o.kappa && psi == o.psi;
    }
    void cleanup();  // drop zero exponents
};

// Product of two monomials on the same graph.
KpMonomial mono_mul(const KpMonomial& a, const KpMonomial& b);

// Decoration degree concentrated at one vertex.
int vertex_decoration_degree(const StableGraph& G, const KpMonomial& m, int v);

// True if some vertex carries decoration degree above its moduli dimension
// (such a class is zero and can be discarded).
bool exceeds_vertex_dim(const StableGraph& G, const KpMonomial& m);

// A stable graph together with a kappa-psi polynomial: the generator
// [Gamma, alpha] and its scalar combinations.
struct DecoratedStratum {
    StableGraph graph;
    std::vector<KpMonomial> poly;

    DecoratedStratum(StableGraph g, std::vector<KpMonomial> p)
        : graph(std::move(g)), poly(std::move(p)) {}
};

// Canonical form of a decorated pair: a byte key that two (graph, monomial)
// pairs share iff they are isomorphic as decorated strata, together with the
// decoration rewritten on canonical_representative(G). The coefficient is not
// part of the key.
struct CanonicalDecoration {
    std::string key;
    KpMonomial mono;  // on canonical_representative(G); keeps the input coeff
};
CanonicalDecoration canonical_decoration(const StableGraph& G, const KpMonomial& m);

// Listing order of decorations on a fixed canonical graph: larger kappa
// partitions first (kappa_2 before kappa_1^2, kappa before psi), then larger
// psi exponent vectors first (psi_1 before psi_2).
bool decoration_less(const StableGraph& G, const KpMonomial& a, const KpMonomial& b);

// Paper-style polynomial rendering, e.g. "1*(kappa_1^1 )_0 psi_2^1".
std::string mono_to_string(const KpMonomial& m);

}  // namespace tautring
