#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "tautring/calculus.hpp"
#include "tautring/dr_cycle.hpp"
#include "tautring/hodge.hpp"
#include "tautring/parser.hpp"
#include "tautring/relsolver.hpp"
#include "tautring/serialize.hpp"

using namespace tautring;

namespace {

struct Options {
    bool json = false;
    std::string moduli = "st";
    std::string cache;
    int threads = 0;
    bool assert_flag = false;
};

std::string vec_to_string(const std::vector<Rat>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += rat_to_string(v[i]);
    }
    return s + ")";
}

TautClass parse_class(const std::string& text) {
    Expression e = parse_expression(text);
    return e.build();
}

StableGraph parse_graph_argument(const std::string& text) {
    Expression e = parse_expression(text);
    TautClass c = e.has_context ? e.build() : [&]() -> TautClass {
        // A bare graph atom carries its own (g,n).
        Expression probe = parse_expression(text + " on (0,3)");
        (void)probe;
        throw std::invalid_argument("graph argument needs the form graph(...) on (g,n)");
    }();
    if (c.terms().size() != 1 || c.terms().front().poly.size() != 1)
        throw std::invalid_argument("graph argument must be a single stratum");
    return c.terms().front().graph;
}

int run(int argc, char** argv) {
    CLI::App app{"taut - exact calculator for the tautological ring of moduli of stable curves"};
    app.require_subcommand(1);
    Options opt;
    app.add_flag("--json", opt.json, "emit machine-readable JSON");
    app.add_option("--moduli", opt.moduli, "moduli type: st, tl, ct, rt, sm")
        ->check(CLI::IsMember({"st", "tl", "ct", "rt", "sm"}));
    app.add_option("--cache", opt.cache, "persistence file for integrals and pairings");
    app.add_option("--threads", opt.threads, "worker cap for pairing computations");
    app.add_flag("--assert", opt.assert_flag, "exit nonzero when an is-zero check fails");

    // gens
    int g = 0, n = 0, r = 0;
    auto* gens_cmd = app.add_subcommand("gens", "list the generators of degree r on (g,n)");
    gens_cmd->add_option("g", g)->required();
    gens_cmd->add_option("n", n)->required();
    gens_cmd->add_option("r", r)->required();

    std::string expr_text;
    auto* eval_cmd = app.add_subcommand("eval", "integrate a zero-cycle expression");
    eval_cmd->add_option("expr", expr_text, "expression with 'on (g,n)' clause")->required();

    auto* basis_cmd = app.add_subcommand("basis", "coordinates in the generating-set basis");
    basis_cmd->add_option("expr", expr_text)->required();

    auto* iszero_cmd = app.add_subcommand("iszero", "test whether a class vanishes");
    iszero_cmd->add_option("expr", expr_text)->required();

    auto* pair_cmd = app.add_subcommand("pair", "pairing matrix, rank and generating indices");
    pair_cmd->add_option("g", g)->required();
    pair_cmd->add_option("n", n)->required();
    pair_cmd->add_option("r", r)->required();

    int dr_g = 0, dr_d = -1;
    std::string dr_a;
    bool dr_rpoly = false;
    auto* dr_cmd = app.add_subcommand("dr", "double ramification cycle DR_g(A)");
    dr_cmd->add_option("g", dr_g)->required();
    dr_cmd->add_option("A", dr_a, "comma-separated integers summing to 0")->required();
    dr_cmd->add_option("-d,--degree", dr_d, "cohomological degree (default g)");
    dr_cmd->add_flag("--rpoly", dr_rpoly, "keep coefficients as polynomials in r");

    std::string graph_text;
    auto* pullback_cmd = app.add_subcommand("pullback", "pull a class back to a boundary graph");
    pullback_cmd->add_option("graph", graph_text, "graph(...) on (g,n)")->required();
    pullback_cmd->add_option("expr", expr_text)->required();

    std::vector<std::string> factor_texts;
    auto* pushforward_cmd =
        app.add_subcommand("pushforward", "push factor classes forward along a gluing map");
    pushforward_cmd->add_option("graph", graph_text, "graph(...) on (g,n)")->required();
    pushforward_cmd->add_option("factors", factor_texts,
                                "per-vertex classes (contextless expressions)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (opt.threads > 0) set_default_threads(opt.threads);
    if (opt.cache.empty()) {
        const char* env = std::getenv("TAUTRING_CACHE");
        if (env != nullptr) opt.cache = env;
    }
    if (!opt.cache.empty()) {
        std::ifstream probe(opt.cache);
        if (probe.good()) load_cache(opt.cache);
    }
    const Moduli moduli = moduli_from_name(opt.moduli);
    int status = 0;

    if (gens_cmd->parsed()) {
        std::vector<TautClass> gens = tautgens(g, n, r, moduli);
        if (opt.json) {
            Json out = Json::array();
            for (const TautClass& c : gens) out.push_back(tautclass_to_json(c));
            std::cout << out.dump(2) << "\n";
        } else {
            for (size_t i = 0; i < gens.size(); ++i) {
                std::string body = gens[i].to_string();
                // Attach the index to the first line, paper style.
                std::cout << "[" << i << "] : " << body.substr(0, body.size()) << "\n";
            }
        }
    } else if (eval_cmd->parsed()) {
        Rat v = evaluate(parse_class(expr_text));
        if (opt.json)
            std::cout << Json{{"value", rat_to_string(v)}}.dump() << "\n";
        else
            std::cout << rat_to_string(v) << "\n";
    } else if (basis_cmd->parsed()) {
        TautClass T = parse_class(expr_text);
        std::set<int> degs = T.degrees();
        if (opt.json) {
            Json out = Json::array();
            for (int d : degs)
                out.push_back(Json{{"degree", d},
                                   {"vector", [&] {
                                        Json v = Json::array();
                                        for (const Rat& x : to_basis(T.degree_part(d), moduli))
                                            v.push_back(rat_to_string(x));
                                        return v;
                                    }()}});
            std::cout << out.dump(2) << "\n";
        } else {
            if (degs.empty()) {
                std::cout << "()\n";
            } else {
                for (int d : degs) {
                    std::vector<Rat> v = to_basis(T.degree_part(d), moduli);
                    if (degs.size() > 1) std::cout << "degree " << d << ": ";
                    std::cout << vec_to_string(v) << "\n";
                }
            }
        }
    } else if (iszero_cmd->parsed()) {
        bool z = is_zero(parse_class(expr_text), moduli);
        if (opt.json)
            std::cout << Json{{"is_zero", z}}.dump() << "\n";
        else
            std::cout << (z ? "true" : "false") << "\n";
        if (opt.assert_flag && !z) status = 1;
    } else if (pair_cmd->parsed()) {
        const PairingTable& table = pairing_matrix(g, n, r);
        std::vector<int> idx = generating_indices(g, n, r, moduli);
        if (opt.json) {
            Json out;
            out["g"] = g;
            out["n"] = n;
            out["r"] = r;
            out["rank"] = idx.size();
            out["generating_indices"] = idx;
            Json m = Json::array();
            for (const auto& mrow : table.matrix) {
                Json jr = Json::array();
                for (const Rat& x : mrow) jr.push_back(rat_to_string(x));
                m.push_back(jr);
            }
            out["matrix"] = m;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << "generators: " << table.gens->strata.size()
                      << ", co-generators: " << table.cogens->strata.size() << "\n";
            std::cout << "rank (" << opt.moduli << "): " << idx.size() << "\n";
            std::cout << "generating indices: [";
            for (size_t i = 0; i < idx.size(); ++i) {
                if (i) std::cout << ", ";
                std::cout << idx[i];
            }
            std::cout << "]\n";
        }
    } else if (dr_cmd->parsed()) {
        std::vector<int> A;
        {
            std::stringstream ss(dr_a);
            std::string item;
            while (std::getline(ss, item, ',')) A.push_back(std::stoi(item));
        }
        if (dr_rpoly) {
            RPolyTautClass c = DR_cycle_rpoly(dr_g, A, dr_d);
            if (opt.json)
                std::cout << rpoly_tautclass_to_json(c).dump(2) << "\n";
            else
                std::cout << c.to_string() << "\n";
        } else {
            TautClass c = DR_cycle(dr_g, A, dr_d);
            if (opt.json)
                std::cout << tautclass_to_json(c).dump(2) << "\n";
            else
                std::cout << c.to_string() << "\n";
        }
    } else if (pullback_cmd->parsed()) {
        StableGraph G = parse_graph_argument(graph_text);
        TautClass T = parse_class(expr_text);
        ProdTautClass P = boundary_pullback(G, T);
        if (opt.json)
            std::cout << prodtautclass_to_json(P).dump(2) << "\n";
        else
            std::cout << P.to_string() << "\n";
    } else if (pushforward_cmd->parsed()) {
        StableGraph G = parse_graph_argument(graph_text);
        std::vector<TautClass> factors;
        for (int v = 0; v < G.num_vertices(); ++v) {
            if (v < static_cast<int>(factor_texts.size())) {
                Expression e = parse_expression(factor_texts[v]);
                factors.push_back(e.has_context ? e.build()
                                                : e.build(G.genus_of(v), G.valence(v)));
            } else {
                factors.push_back(fundclass(G.genus_of(v), G.valence(v)));
            }
        }
        TautClass c = boundary_pushforward(G, factors);
        if (opt.json)
            std::cout << tautclass_to_json(c).dump(2) << "\n";
        else
            std::cout << c.to_string() << "\n";
    }

    if (!opt.cache.empty()) save_cache(opt.cache);
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
