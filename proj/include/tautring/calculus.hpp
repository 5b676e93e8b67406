#pragma once

#include <vector>

#include "tautring/prod_class.hpp"
#include "tautring/taut_class.hpp"

namespace tautring {

// Degree of the zero-cycle part: integrates the top-degree piece of T over
// the moduli space; lower-degree pieces contribute nothing.
Rat evaluate(const TautClass& T);

// Cup product through the excess intersection formula.
TautClass multiply(const TautClass& a, const TautClass& b);
TautClass operator*(const TautClass& a, const TautClass& b);
TautClass power(const TautClass& a, int e);

// Pullback along the gluing map of G, as a class on the product of the
// vertex moduli spaces.
ProdTautClass boundary_pullback(const StableGraph& G, const TautClass& T);

// Pushforward along the gluing map of G of a product of per-vertex classes.
// Marking j of factors[i] corresponds to leg number j at vertex i of G.
// An empty factor list means all fundamental classes.
TautClass boundary_pushforward(const StableGraph& G, const std::vector<TautClass>& factors);

// Pushforward along the map forgetting the given markings. Remaining
// markings close ranks (each forgotten marking shifts the ones above it).
TautClass forgetful_pushforward(const TautClass& T, const std::vector<int>& markings);

// Pullback along the map forgetting k extra markings n+1..n+k.
TautClass forgetful_pullback(const TautClass& T, int k);

// evaluate(multiply([Ga,ma],[Gb,mb])) with coefficients stripped, memoized on
// canonical decorated keys. The workhorse behind pairing matrices.
Rat pair_eval(const StableGraph& Ga, const KpMonomial& ma, const StableGraph& Gb,
              const KpMonomial& mb);

}  // namespace tautring
