#include "tautring/relsolver.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>

#include "tautring/integrals.hpp"
#include "tautring/serialize.hpp"

namespace tautring {

namespace {

std::map<std::tuple<int, int, int>, std::unique_ptr<PairingTable>>& table_registry() {
    static std::map<std::tuple<int, int, int>, std::unique_ptr<PairingTable>> registry;
    return registry;
}
std::mutex& table_registry_mutex() {
    static std::mutex mtx;
    return mtx;
}

std::atomic<int> g_threads{0};  // 0 = pick automatically

int effective_threads() {
    int t = g_threads.load();
    if (t > 0) return t;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
    const int workers = std::min<size_t>(effective_threads(), count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

// Pairing matrices loaded from disk, awaiting validation against the
// recomputed generator keys.
struct PendingTable {
    std::vector<std::string> gen_keys;
    std::vector<std::vector<std::string>> matrix;
};
std::map<std::string, PendingTable>& pending_tables() {
    static std::map<std::string, PendingTable> tables;
    return tables;
}
std::mutex& pending_mutex() {
    static std::mutex mtx;
    return mtx;
}

std::string table_key(int g, int n, int r) {
    return std::to_string(g) + "|" + std::to_string(n) + "|" + std::to_string(r);
}

}  // namespace

int default_threads() { return effective_threads(); }
void set_default_threads(int t) { g_threads.store(t); }

const PairingTable& pairing_matrix(int g, int n, int r) {
    auto& registry = table_registry();
    auto& mtx = table_registry_mutex();
    const auto key = std::make_tuple(g, n, r);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = registry.find(key);
        if (it != registry.end()) return *it->second;
    }

    if (r < 0 || r > 3 * g - 3 + n)
        throw std::invalid_argument("pairing_matrix: degree out of range");

    auto table = std::make_unique<PairingTable>();
    table->g = g;
    table->n = n;
    table->r = r;
    table->gens = &generator_list(g, n, r);
    table->cogens = &generator_list(g, n, 3 * g - 3 + n - r);
    const size_t R = table->gens->strata.size();
    const size_t C = table->cogens->strata.size();
    table->matrix.assign(R, std::vector<Rat>(C, Rat(0)));

    // A disk-loaded matrix is used only if the generator keys still match.
    bool filled = false;
    {
        std::lock_guard<std::mutex> lock(pending_mutex());
        auto it = pending_tables().find(table_key(g, n, r));
        if (it != pending_tables().end()) {
            const PendingTable& pt = it->second;
            if (pt.gen_keys == table->gens->keys && pt.matrix.size() == R &&
                (R == 0 || pt.matrix.front().size() == C)) {
                for (size_t i = 0; i < R; ++i)
                    for (size_t j = 0; j < C; ++j)
                        table->matrix[i][j] = rat_from_string(pt.matrix[i][j]);
                filled = true;
            }
        }
    }

    if (!filled) {
        parallel_for(R * C, [&](size_t idx) {
            const size_t i = idx / C, j = idx % C;
            const DecoratedStratum& a = table->gens->strata[i];
            const DecoratedStratum& b = table->cogens->strata[j];
            table->matrix[i][j] =
                pair_eval(a.graph, a.poly.front(), b.graph, b.poly.front());
        });
    }

    std::lock_guard<std::mutex> lock(mtx);
    auto [it2, inserted] = registry.emplace(key, std::move(table));
    return *it2->second;
}

namespace {

// Incremental row space in echelon form.
struct Echelon {
    std::vector<std::vector<Rat>> rows;  // each normalized to pivot 1
    std::vector<size_t> pivots;

    std::vector<Rat> reduce(std::vector<Rat> v) const {
        for (size_t i = 0; i < rows.size(); ++i) {
            const Rat& c = v[pivots[i]];
            if (c == 0) continue;
            Rat f = c;
            for (size_t j = 0; j < v.size(); ++j) {
                v[j] -= f * rows[i][j];
                v[j].canonicalize();
            }
        }
        return v;
    }

    bool add(std::vector<Rat> v) {
        v = reduce(std::move(v));
        size_t p = v.size();
        for (size_t j = 0; j < v.size(); ++j)
            if (v[j] != 0) {
                p = j;
                break;
            }
        if (p == v.size()) return false;
        Rat inv = v[p];
        for (Rat& x : v) {
            x /= inv;
            x.canonicalize();
        }
        rows.push_back(std::move(v));
        pivots.push_back(p);
        return true;
    }
};

Echelon excluded_echelon(const PairingTable& table, Moduli moduli) {
    Echelon ech;
    if (moduli == Moduli::St) return ech;
    for (size_t i = 0; i < table.gens->strata.size(); ++i)
        if (!table.gens->strata[i].graph.moduli_allows(moduli)) ech.add(table.matrix[i]);
    return ech;
}

}  // namespace

std::vector<int> generating_indices(int g, int n, int r, Moduli moduli) {
    static std::map<std::tuple<int, int, int, int>, std::vector<int>> memo;
    static std::mutex mtx;
    const auto key = std::make_tuple(g, n, r, static_cast<int>(moduli));
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    const PairingTable& table = pairing_matrix(g, n, r);
    Echelon ech = excluded_echelon(table, moduli);
    std::vector<int> out;
    for (size_t i = 0; i < table.gens->strata.size(); ++i) {
        if (!table.gens->strata[i].graph.moduli_allows(moduli)) continue;
        if (ech.add(table.matrix[i])) out.push_back(static_cast<int>(i));
    }
    std::lock_guard<std::mutex> lock(mtx);
    memo.emplace(key, out);
    return out;
}

std::vector<Rat> pairing_row(const TautClass& T, int r) {
    const PairingTable& table = pairing_matrix(T.g(), T.n(), r);
    const auto& cogens = table.cogens->strata;
    std::vector<Rat> row(cogens.size(), Rat(0));
    parallel_for(cogens.size(), [&](size_t j) {
        Rat acc(0);
        for (const DecoratedStratum& t : T.terms())
            for (const KpMonomial& m : t.poly) {
                if (m.coeff == 0) continue;
                acc += pair_eval(t.graph, m, cogens[j].graph, cogens[j].poly.front());
            }
        acc.canonicalize();
        row[j] = acc;
    });
    return row;
}

std::vector<Rat> to_basis(const TautClass& T, Moduli moduli) {
    std::set<int> degs = T.degrees();
    if (degs.size() > 1)
        throw std::invalid_argument(
            "to_basis: class is inhomogeneous; take degree_part first");
    const int r = degs.empty() ? 0 : *degs.begin();
    const PairingTable& table = pairing_matrix(T.g(), T.n(), r);
    std::vector<int> basis = generating_indices(T.g(), T.n(), r, moduli);
    std::vector<Rat> target = pairing_row(T, r);

    // Solve target = sum x_i row(basis_i) + sum y_j row(excluded_j); the
    // x-part is unique because basis rows stay independent of the excluded
    // span.
    std::vector<const std::vector<Rat>*> cols;
    for (int i : basis) cols.push_back(&table.matrix[i]);
    if (moduli != Moduli::St)
        for (size_t i = 0; i < table.gens->strata.size(); ++i)
            if (!table.gens->strata[i].graph.moduli_allows(moduli))
                cols.push_back(&table.matrix[i]);

    const size_t K = cols.size();
    const size_t C = target.size();
    // Augmented system: one equation per co-generator.
    std::vector<std::vector<Rat>> aug(C, std::vector<Rat>(K + 1, Rat(0)));
    for (size_t c = 0; c < C; ++c) {
        for (size_t i = 0; i < K; ++i) aug[c][i] = (*cols[i])[c];
        aug[c][K] = target[c];
    }

    std::vector<long> pivot_row(K, -1);
    size_t row = 0;
    for (size_t col = 0; col < K && row < C; ++col) {
        size_t sel = row;
        while (sel < C && aug[sel][col] == 0) ++sel;
        if (sel == C) continue;
        std::swap(aug[sel], aug[row]);
        Rat inv = aug[row][col];
        for (size_t j = col; j <= K; ++j) {
            aug[row][j] /= inv;
            aug[row][j].canonicalize();
        }
        for (size_t i = 0; i < C; ++i) {
            if (i == row || aug[i][col] == 0) continue;
            Rat f = aug[i][col];
            for (size_t j = col; j <= K; ++j) {
                aug[i][j] -= f * aug[row][j];
                aug[i][j].canonicalize();
            }
        }
        pivot_row[col] = static_cast<long>(row);
        ++row;
    }
    for (size_t i = row; i < C; ++i)
        if (aug[i][K] != 0)
            throw std::logic_error("to_basis: pairing row lies outside the selected span");

    std::vector<Rat> coords;
    for (size_t i = 0; i < basis.size(); ++i) {
        if (pivot_row[i] >= 0)
            coords.push_back(aug[pivot_row[i]][K]);
        else
            coords.push_back(Rat(0));
    }
    return coords;
}

bool is_zero(const TautClass& T, Moduli moduli) {
    TautClass S = T.simplified();
    if (S.empty()) return true;
    for (int r : S.degrees()) {
        if (r > S.dim()) continue;
        TautClass part = S.degree_part(r);
        std::vector<Rat> row = pairing_row(part, r);
        const PairingTable& table = pairing_matrix(S.g(), S.n(), r);
        Echelon ech = excluded_echelon(table, moduli);
        std::vector<Rat> rem = ech.reduce(std::move(row));
        for (const Rat& x : rem)
            if (x != 0) return false;
    }
    return true;
}

void save_cache(const std::string& path) {
    Json doc;
    doc["version"] = 1;
    Json psi = Json::object();
    for (const auto& [k, v] : IntegralCache::instance().psi_entries()) psi[k] = v;
    doc["psi"] = psi;

    Json pairings = Json::object();
    // Everything loaded earlier plus everything computed this session.
    {
        std::lock_guard<std::mutex> lock(pending_mutex());
        for (const auto& [k, pt] : pending_tables()) {
            Json jt;
            jt["gens"] = pt.gen_keys;
            jt["matrix"] = pt.matrix;
            pairings[k] = jt;
        }
    }
    {
        std::lock_guard<std::mutex> lock(table_registry_mutex());
        for (const auto& [key, table] : table_registry()) {
            Json jt;
            jt["gens"] = table->gens->keys;
            Json rows = Json::array();
            for (const auto& mrow : table->matrix) {
                Json jrow = Json::array();
                for (const Rat& x : mrow) jrow.push_back(rat_to_string(x));
                rows.push_back(jrow);
            }
            jt["matrix"] = rows;
            pairings[table_key(std::get<0>(key), std::get<1>(key), std::get<2>(key))] = jt;
        }
    }
    doc["pairings"] = pairings;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write cache file " + path);
        out << doc.dump();
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move cache file into place: " + path);
}

void load_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read cache file " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error("corrupt cache file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw std::runtime_error("corrupt cache file " + path);
    if (doc.value("version", -1) != 1)
        throw std::runtime_error("unsupported cache version in " + path);
    if (doc.contains("psi")) {
        std::map<std::string, std::string> entries;
        for (auto it = doc["psi"].begin(); it != doc["psi"].end(); ++it)
            entries[it.key()] = it.value().get<std::string>();
        IntegralCache::instance().merge_psi_entries(entries);
    }
    if (doc.contains("pairings")) {
        std::lock_guard<std::mutex> lock(pending_mutex());
        for (auto it = doc["pairings"].begin(); it != doc["pairings"].end(); ++it) {
            PendingTable pt;
            pt.gen_keys = it.value().at("gens").get<std::vector<std::string>>();
            pt.matrix = it.value().at("matrix").get<std::vector<std::vector<std::string>>>();
            pending_tables()[it.key()] = std::move(pt);
        }
    }
}

TensorBasisResult totensor_basis(const ProdTautClass& P, int r, Moduli moduli) {
    const StableGraph& base = P.base();
    if (base.num_vertices() != 2)
        throw std::invalid_argument("totensor_basis: base graph must have two vertices");
    const int g1 = base.genus_of(0), n1 = base.valence(0);
    const int g2 = base.genus_of(1), n2 = base.valence(1);

    TensorBasisResult res;
    for (int r1 = 0; r1 <= r; ++r1) {
        const int r2 = r - r1;
        std::vector<int> b1, b2;
        if (r1 <= 3 * g1 - 3 + n1) b1 = generating_indices(g1, n1, r1, moduli);
        if (r2 <= 3 * g2 - 3 + n2) b2 = generating_indices(g2, n2, r2, moduli);
        std::vector<std::vector<Rat>> block(b1.size(), std::vector<Rat>(b2.size(), Rat(0)));
        if (!b1.empty() && !b2.empty()) {
            for (const ProdTensorTerm& t : P.terms()) {
                TautClass f1 = t.factors[0].degree_part(r1);
                TautClass f2 = t.factors[1].degree_part(r2);
                if (f1.empty() || f2.empty()) continue;
                std::vector<Rat> v1 = to_basis(f1, moduli);
                std::vector<Rat> v2 = to_basis(f2, moduli);
                for (size_t i = 0; i < v1.size(); ++i) {
                    if (v1[i] == 0) continue;
                    for (size_t j = 0; j < v2.size(); ++j) {
                        block[i][j] += t.coeff * v1[i] * v2[j];
                        block[i][j].canonicalize();
                    }
                }
            }
        }
        res.splits.emplace_back(r1, r2);
        res.blocks.push_back(std::move(block));
    }
    for (const auto& block : res.blocks)
        for (const auto& brow : block)
            for (const Rat& x : brow) res.vec.push_back(x);
    return res;
}

}  // namespace tautring
