#pragma once

#include <map>
#include <string>
#include <vector>

#include "tautring/taut_class.hpp"

namespace tautring {

// A modular weighting: half-edge values in [0, r) with w(h) + w(h') = 0 and
// zero total at every vertex, legs contributing a_i mod r.
struct Weighting {
    std::map<int, int> w;
};

// All weightings of G at modulus r for the leg vector A (indexed by
// markings 1..n). Their number is r^{h1(G)}.
std::vector<Weighting> enumerate_weightings(const StableGraph& G, int r,
                                            const std::vector<int>& A);

// Degree-d part of Pixton's mod-r class for k = 0.
TautClass pixton_class_at_r(int g, const std::vector<int>& A, int d, int r);

// Exact polynomial in one formal variable.
struct RatPoly {
    std::vector<Rat> c;  // c[i] multiplies r^i

    Rat at(const Rat& x) const;
    void trim();
    int degree() const { return static_cast<int>(c.size()) - 1; }
    std::string to_string() const;  // "c0 + c1*r + c2*r^2"
};

// Tautological class with polynomial coefficients in r; specializing r = 0
// recovers a TautClass.
struct RPolyTautClass {
    int g, n;
    std::vector<std::pair<DecoratedStratum, RatPoly>> terms;  // unit-coeff strata

    TautClass at(const Rat& r) const;
    std::string to_string() const;
};

// The double ramification cycle 2^{-d} P_g^{d}(A) for k = 0; d defaults to g.
TautClass DR_cycle(int g, const std::vector<int>& A, int d = -1);

// Same, keeping the full r-polynomial 2^{-d} P_g^{d,r}(A).
RPolyTautClass DR_cycle_rpoly(int g, const std::vector<int>& A, int d = -1);

}  // namespace tautring
