#pragma once

#include <string>
#include <vector>

#include "tautring/taut_class.hpp"

namespace tautring {

// One pure tensor on the product of vertex moduli spaces of a base graph:
// coeff * (factor on vertex 0) x (factor on vertex 1) x ...
// Factor i lives on (g(v_i), n(v_i)) with markings 1..n(v_i) matching the
// order of the base graph's leg list at v_i.
struct ProdTensorTerm {
    Rat coeff;
    std::vector<TautClass> factors;
};

// A tautological class on the product space attached to a stable graph,
// stored as a sum of pure tensors.
class ProdTautClass {
public:
    explicit ProdTautClass(StableGraph base) : base_(std::move(base)) {}

    const StableGraph& base() const { return base_; }
    const std::vector<ProdTensorTerm>& terms() const { return terms_; }
    std::vector<ProdTensorTerm>& terms() { return terms_; }

    void add_term(ProdTensorTerm t);

    // Pushforward along the gluing map of the base graph.
    TautClass pushforward() const;

    std::string to_string() const;

private:
    StableGraph base_;
    std::vector<ProdTensorTerm> terms_;
};

}  // namespace tautring
