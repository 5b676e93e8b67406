#pragma once

#include <stdexcept>
#include <string>

namespace tautring {

// Open subsets of the moduli space, ordered by inclusion:
// sm < rt < ct < tl < st.
enum class Moduli { St, Tl, Ct, Rt, Sm };

inline std::string moduli_name(Moduli m) {
    switch (m) {
        case Moduli::St: return "st";
        case Moduli::Tl: return "tl";
        case Moduli::Ct: return "ct";
        case Moduli::Rt: return "rt";
        case Moduli::Sm: return "sm";
    }
    return "st";
}

inline Moduli moduli_from_name(const std::string& s) {
    if (s == "st") return Moduli::St;
    if (s == "tl") return Moduli::Tl;
    if (s == "ct") return Moduli::Ct;
    if (s == "rt") return Moduli::Rt;
    if (s == "sm") return Moduli::Sm;
    throw std::invalid_argument("unknown moduli type: " + s);
}

}  // namespace tautring
