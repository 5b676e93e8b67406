#include "tautring/kp_poly.hpp"

#include <algorithm>
#include <sstream>

#include "tautring/graph_enum.hpp"

namespace tautring {

KpMonomial KpMonomial::unit(int num_vertices, const Rat& c) {
    KpMonomial m;
    m.coeff = c;
    m.kappa.resize(num_vertices);
    return m;
}

int KpMonomial::degree() const {
    int d = 0;
    for (const auto& vk : kappa)
        for (const auto& [a, e] : vk) d += a * e;
    for (const auto& [l, e] : psi) d += e;
    return d;
}

void KpMonomial::cleanup() {
    for (auto& vk : kappa)
        for (auto it = vk.begin(); it != vk.end();)
            it = (it->second == 0 || it->first == 0) ? vk.erase(it) : std::next(it);
    for (auto it = psi.begin(); it != psi.end();)
        it = (it->second == 0) ? psi.erase(it) : std::next(it);
}

KpMonomial mono_mul(const KpMonomial& a, const KpMonomial& b) {
    KpMonomial m = a;
    m.coeff = a.coeff * b.coeff;
    m.coeff.canonicalize();
    if (b.kappa.size() != a.kappa.size())
        throw std::invalid_argument("monomials live on different graphs");
    for (size_t v = 0; v < b.kappa.size(); ++v)
        for (const auto& [deg, e] : b.kappa[v]) m.kappa[v][deg] += e;
    for (const auto& [l, e] : b.psi) m.psi[l] += e;
    return m;
}

int vertex_decoration_degree(const StableGraph& G, const KpMonomial& m, int v) {
    int d = 0;
    for (const auto& [a, e] : m.kappa.at(v)) d += a * e;
    for (int l : G.legs_of(v)) {
        auto it = m.psi.find(l);
        if (it != m.psi.end()) d += it->second;
    }
    return d;
}

bool exceeds_vertex_dim(const StableGraph& G, const KpMonomial& m) {
    for (int v = 0; v < G.num_vertices(); ++v)
        if (vertex_decoration_degree(G, m, v) > G.vertex_dim(v)) return true;
    return false;
}

namespace {

// Vertex image of an automorphism, recovered through any leg.
int aut_vertex_image(const StableGraph& G, const LegMap& aut, int v) {
    const auto& ls = G.legs_of(v);
    if (ls.empty()) return v;  // only possible for single-vertex graphs
    return G.vertex_of(aut.at(ls.front()));
}

std::string encode_decoration(const KpMonomial& m) {
    std::ostringstream os;
    os << "K";
    for (const auto& vk : m.kappa) {
        os << ";";
        for (const auto& [a, e] : vk)
            if (e > 0) os << a << "^" << e << ",";
    }
    os << "|P";
    for (const auto& [l, e] : m.psi)
        if (e > 0) os << ";" << l << "^" << e;
    return os.str();
}

}  // namespace

CanonicalDecoration canonical_decoration(const StableGraph& G, const KpMonomial& m) {
    const CanonicalForm& cf = G.canonical_form();
    const int V = G.num_vertices();

    std::string best;
    KpMonomial best_mono;
    for (const LegMap& aut : cf.automorphisms) {
        KpMonomial t;
        t.coeff = m.coeff;
        t.kappa.resize(V);
        for (int v = 0; v < V; ++v) {
            if (m.kappa[v].empty()) continue;
            int pos = cf.vertex_map[aut_vertex_image(G, aut, v)];
            for (const auto& [a, e] : m.kappa[v])
                if (e > 0) t.kappa[pos][a] += e;
        }
        for (const auto& [l, e] : m.psi)
            if (e > 0) t.psi[cf.leg_map.at(aut.at(l))] += e;
        std::string enc = encode_decoration(t);
        if (best.empty() || enc < best) {
            best = enc;
            best_mono = t;
        }
    }
    return CanonicalDecoration{cf.key + "#" + best, best_mono};
}

bool decoration_less(const StableGraph& G, const KpMonomial& a, const KpMonomial& b) {
    // kappa exponent maps as descending partitions, vertex by vertex.
    auto partition_of = [](const std::map<int, int>& vk) {
        std::vector<int> parts;
        for (const auto& [deg, e] : vk)
            for (int i = 0; i < e; ++i) parts.push_back(deg);
        std::sort(parts.rbegin(), parts.rend());
        return parts;
    };
    for (int v = 0; v < G.num_vertices(); ++v) {
        auto pa = partition_of(a.kappa.at(v)), pb = partition_of(b.kappa.at(v));
        if (pa != pb) return pa > pb;
    }
    std::vector<int> va, vb;
    for (int v = 0; v < G.num_vertices(); ++v)
        for (int l : G.legs_of(v)) {
            auto ita = a.psi.find(l);
            auto itb = b.psi.find(l);
            va.push_back(ita == a.psi.end() ? 0 : ita->second);
            vb.push_back(itb == b.psi.end() ? 0 : itb->second);
        }
    return va > vb;
}

std::string mono_to_string(const KpMonomial& m) {
    std::ostringstream os;
    Rat c = m.coeff;
    c.canonicalize();
    if (sgn(c) < 0)
        os << "(" << rat_to_string(c) << ")*";
    else
        os << rat_to_string(c) << "*";
    bool wrote = false;
    for (size_t v = 0; v < m.kappa.size(); ++v) {
        bool any = false;
        for (const auto& [a, e] : m.kappa[v])
            if (e > 0) any = true;
        if (!any) continue;
        if (wrote) os << " ";
        os << "(";
        bool first = true;
        for (const auto& [a, e] : m.kappa[v]) {
            if (e == 0) continue;
            if (!first) os << " ";
            os << "kappa_" << a << "^" << e;
            first = false;
        }
        os << " )_" << v;
        wrote = true;
    }
    for (const auto& [l, e] : m.psi) {
        if (e == 0) continue;
        if (wrote) os << " ";
        os << "psi_" << l << "^" << e;
        wrote = true;
    }
    return os.str();
}

}  // namespace tautring
