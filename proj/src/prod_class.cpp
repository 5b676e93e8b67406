#include "tautring/prod_class.hpp"

#include <sstream>

#include "tautring/calculus.hpp"

namespace tautring {

void ProdTautClass::add_term(ProdTensorTerm t) {
    if (static_cast<int>(t.factors.size()) != base_.num_vertices())
        throw std::invalid_argument("tensor term arity does not match the base graph");
    for (int v = 0; v < base_.num_vertices(); ++v) {
        if (t.factors[v].g() != base_.genus_of(v) || t.factors[v].n() != base_.valence(v))
            throw std::invalid_argument("tensor factor lives on the wrong vertex space");
    }
    terms_.push_back(std::move(t));
}

TautClass ProdTautClass::pushforward() const {
    TautClass out(base_.genus(), base_.num_markings());
    for (const ProdTensorTerm& t : terms_)
        out += boundary_pushforward(base_, t.factors) * t.coeff;
    return out;
}

std::string ProdTautClass::to_string() const {
    std::ostringstream os;
    os << "Outer graph : " << base_.to_string();
    if (terms_.empty()) {
        os << "\n0";
        return os.str();
    }
    for (size_t i = 0; i < terms_.size(); ++i) {
        os << "\nTerm " << i << " with coefficient " << rat_to_string(terms_[i].coeff) << ":";
        for (int v = 0; v < base_.num_vertices(); ++v) {
            os << "\n  Vertex " << v << " factor:\n";
            std::istringstream block(terms_[i].factors[v].to_string());
            std::string line;
            while (std::getline(block, line)) os << "    " << line << "\n";
        }
    }
    return os.str();
}

}  // namespace tautring
