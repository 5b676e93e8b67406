#pragma once

#include <set>
#include <string>
#include <vector>

#include "tautring/kp_poly.hpp"
#include "tautring/moduli.hpp"

namespace tautring {

// A formal Q-linear combination of decorated strata on a fixed (g,n).
// Arithmetic does not merge equivalent terms; simplify() does.
class TautClass {
public:
    TautClass(int g, int n) : g_(g), n_(n) {}
    TautClass(int g, int n, std::vector<DecoratedStratum> terms)
        : g_(g), n_(n), terms_(std::move(terms)) {}

    int g() const { return g_; }
    int n() const { return n_; }
    int dim() const { return 3 * g_ - 3 + n_; }
    const std::vector<DecoratedStratum>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add_term(DecoratedStratum t) { terms_.push_back(std::move(t)); }
    void add_term(const StableGraph& G, const KpMonomial& m) {
        terms_.emplace_back(G, std::vector<KpMonomial>{m});
    }

    TautClass& operator+=(const TautClass& o);
    TautClass& operator-=(const TautClass& o);
    TautClass& operator*=(const Rat& c);
    TautClass operator-() const;

    // Homogeneous piece of algebraic degree r (#edges + decoration degree).
    TautClass degree_part(int r) const;
    // All degrees appearing with a nonzero (pre-simplify) term.
    std::set<int> degrees() const;
    bool is_homogeneous() const { return degrees().size() <= 1; }

    // Groups terms by canonical decorated form, sums coefficients, drops
    // zeros and dimension-exceeding decorations. Deterministic output order.
    TautClass simplified() const;

    // Paper layout: "Graph : ... / Polynomial : ..." per stratum.
    std::string to_string() const;

private:
    int g_, n_;
    std::vector<DecoratedStratum> terms_;
};

TautClass operator+(TautClass a, const TautClass& b);
TautClass operator-(TautClass a, const TautClass& b);
TautClass operator*(TautClass a, const Rat& c);
TautClass operator*(const Rat& c, TautClass a);

TautClass fundclass(int g, int n);
TautClass psiclass(int i, int g, int n);
TautClass kappaclass(int a, int g, int n);
// Pushforward of the fundamental class along the gluing map of the
// two-vertex graph [(h, A u {p}) | (g-h, A^c u {p'})].
TautClass sepbdiv(int h, const std::set<int>& A, int g, int n);
// Pushforward along the self-node gluing map; twice the class of the
// irreducible boundary divisor.
TautClass irrbdiv(int g, int n);
TautClass graph_to_class(const StableGraph& G);

// All generators of degree r on (g,n): one representative per isomorphism
// class of decorated strata with <= r edges, total degree r, and per-vertex
// decoration degree within the vertex dimension; graphs restricted by the
// moduli type; deterministic documented order.
std::vector<TautClass> tautgens(int g, int n, int r, Moduli moduli = Moduli::St);

// The (graph, monomial) list underlying tautgens, cheaper to pair against.
struct GeneratorList {
    int g, n, r;
    std::vector<DecoratedStratum> strata;  // one monomial each, coeff 1
    std::vector<std::string> keys;         // canonical decorated keys
};
const GeneratorList& generator_list(int g, int n, int r);

}  // namespace tautring
