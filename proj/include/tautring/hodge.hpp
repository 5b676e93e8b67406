#pragma once

#include "tautring/taut_class.hpp"

namespace tautring {

// Chern character of the Hodge bundle truncated at maxdeg. Even components
// vanish identically and are stored as empty classes.
struct ChernCharacter {
    int g, n;
    std::vector<TautClass> components;  // components[l-1] = ch_l, l = 1..maxdeg

    const TautClass& ch(int l) const { return components.at(l - 1); }
    int maxdeg() const { return static_cast<int>(components.size()); }
};

ChernCharacter hodge_chern_character(int g, int n, int maxdeg);

// lambda_d = c_d of the Hodge bundle, from the Chern character through the
// exponential of weighted power sums.
TautClass lambdaclass(int d, int g, int n);

}  // namespace tautring
