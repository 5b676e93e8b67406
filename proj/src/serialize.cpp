#include "tautring/serialize.hpp"

namespace tautring {

Json graph_to_json(const StableGraph& G) {
    Json j;
    j["genera"] = G.genera();
    j["legs"] = G.legs();
    Json edges = Json::array();
    for (const Edge& e : G.edges()) edges.push_back({e.first, e.second});
    j["edges"] = edges;
    return j;
}

StableGraph graph_from_json(const Json& j) {
    std::vector<int> genera = j.at("genera").get<std::vector<int>>();
    std::vector<std::vector<int>> legs = j.at("legs").get<std::vector<std::vector<int>>>();
    std::vector<Edge> edges;
    for (const Json& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return StableGraph(genera, legs, edges);
}

namespace {

Json mono_to_json(const KpMonomial& m) {
    Json j;
    j["coeff"] = rat_to_string(m.coeff);
    Json kappa = Json::array();
    for (size_t v = 0; v < m.kappa.size(); ++v) {
        if (m.kappa[v].empty()) continue;
        Json entries = Json::array();
        for (const auto& [a, e] : m.kappa[v])
            if (e > 0) entries.push_back({a, e});
        if (!entries.empty()) kappa.push_back({static_cast<int>(v), entries});
    }
    j["kappa"] = kappa;
    Json psi = Json::array();
    for (const auto& [l, e] : m.psi)
        if (e > 0) psi.push_back({l, e});
    j["psi"] = psi;
    return j;
}

KpMonomial mono_from_json(const Json& j, int num_vertices) {
    KpMonomial m = KpMonomial::unit(num_vertices, rat_from_string(j.at("coeff").get<std::string>()));
    for (const Json& vk : j.at("kappa")) {
        int v = vk.at(0).get<int>();
        for (const Json& ae : vk.at(1)) m.kappa.at(v)[ae.at(0).get<int>()] = ae.at(1).get<int>();
    }
    for (const Json& le : j.at("psi")) m.psi[le.at(0).get<int>()] = le.at(1).get<int>();
    return m;
}

}  // namespace

Json tautclass_to_json(const TautClass& T) {
    Json j;
    j["g"] = T.g();
    j["n"] = T.n();
    Json terms = Json::array();
    for (const DecoratedStratum& t : T.terms()) {
        Json jt;
        jt["graph"] = graph_to_json(t.graph);
        Json monos = Json::array();
        for (const KpMonomial& m : t.poly) monos.push_back(mono_to_json(m));
        jt["monomials"] = monos;
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j;
}

TautClass tautclass_from_json(const Json& j) {
    TautClass T(j.at("g").get<int>(), j.at("n").get<int>());
    for (const Json& jt : j.at("terms")) {
        StableGraph G = graph_from_json(jt.at("graph"));
        std::vector<KpMonomial> poly;
        for (const Json& jm : jt.at("monomials"))
            poly.push_back(mono_from_json(jm, G.num_vertices()));
        T.add_term(DecoratedStratum(std::move(G), std::move(poly)));
    }
    return T;
}

Json prodtautclass_to_json(const ProdTautClass& P) {
    Json j;
    j["g"] = P.base().genus();
    j["n"] = P.base().num_markings();
    j["graph"] = graph_to_json(P.base());
    Json terms = Json::array();
    for (const ProdTensorTerm& t : P.terms()) {
        Json jt;
        jt["coeff"] = rat_to_string(t.coeff);
        Json factors = Json::array();
        for (const TautClass& f : t.factors) factors.push_back(tautclass_to_json(f));
        jt["factors"] = factors;
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j;
}

Json rpoly_tautclass_to_json(const RPolyTautClass& P) {
    Json j;
    j["g"] = P.g;
    j["n"] = P.n;
    Json terms = Json::array();
    for (const auto& [stratum, poly] : P.terms) {
        Json jt;
        jt["graph"] = graph_to_json(stratum.graph);
        jt["monomial"] = mono_to_json(stratum.poly.front());
        jt["poly"] = poly.to_string();
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j;
}

}  // namespace tautring
