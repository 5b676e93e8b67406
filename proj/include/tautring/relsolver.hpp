#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tautring/calculus.hpp"
#include "tautring/moduli.hpp"

namespace tautring {

// Exact intersection pairings between the degree-r generators and the
// generators of complementary degree, with cached pivot data per moduli type.
struct PairingTable {
    int g, n, r;
    const GeneratorList* gens;    // degree r
    const GeneratorList* cogens;  // degree 3g-3+n-r
    std::vector<std::vector<Rat>> matrix;
};

const PairingTable& pairing_matrix(int g, int n, int r);

// Indices (into tautgens(g,n,r)) of a basis of the degree-r part over the
// given moduli type: greedy scan, keeping generators whose pairing rows are
// independent modulo the rows of the moduli-excluded generators.
std::vector<int> generating_indices(int g, int n, int r, Moduli moduli = Moduli::St);

// Coordinates of a homogeneous class in the generating_indices basis,
// modulo the pairing kernel and the moduli-excluded span.
std::vector<Rat> to_basis(const TautClass& T, Moduli moduli = Moduli::St);

// Zero test: term-level cancellation first, then pairing rows against the
// span of the moduli-excluded generators (degreewise).
bool is_zero(const TautClass& T, Moduli moduli = Moduli::St);

// Pairing row of a homogeneous degree-r class against the co-generators.
std::vector<Rat> pairing_row(const TautClass& T, int r);

// Persistent cache (psi integrals + pairing matrices), JSON document.
void save_cache(const std::string& path);
void load_cache(const std::string& path);

// Worker cap for pairing-matrix construction.
int default_threads();
void set_default_threads(int t);

// Block matrices of a two-vertex product class in the tensor products of the
// per-factor bases, for every degree split (r1, r2) with r1 + r2 = r, plus
// the row-major flattened vector.
struct TensorBasisResult {
    std::vector<std::pair<int, int>> splits;
    std::vector<std::vector<std::vector<Rat>>> blocks;
    std::vector<Rat> vec;
};
TensorBasisResult totensor_basis(const ProdTautClass& P, int r, Moduli moduli = Moduli::St);

}  // namespace tautring
