#include "tautring/integrals.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace tautring {

IntegralCache& IntegralCache::instance() {
    static IntegralCache cache;
    return cache;
}

bool IntegralCache::lookup(const std::string& key, Rat& out) {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = table_.find(key);
    if (it == table_.end()) {
        ++misses_;
        return false;
    }
    ++hits_;
    out = it->second;
    return true;
}

void IntegralCache::store(const std::string& key, const Rat& value) {
    std::lock_guard<std::mutex> lock(mtx_);
    table_.emplace(key, value);
}

std::map<std::string, std::string> IntegralCache::psi_entries() const {
    std::lock_guard<std::mutex> lock(mtx_);
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : table_)
        if (k.rfind("psi:", 0) == 0) out.emplace(k.substr(4), rat_to_string(v));
    return out;
}

void IntegralCache::merge_psi_entries(const std::map<std::string, std::string>& entries) {
    std::lock_guard<std::mutex> lock(mtx_);
    for (const auto& [k, v] : entries) table_.emplace("psi:" + k, rat_from_string(v));
}

std::string psi_key(int g, const std::vector<int>& sorted_exps) {
    std::string key = std::to_string(g) + "|";
    for (size_t i = 0; i < sorted_exps.size(); ++i) {
        if (i) key += ",";
        key += std::to_string(sorted_exps[i]);
    }
    return key;
}

namespace {

Rat psi_integral_sorted(int g, std::vector<int> d);

// String equation: remove one tau_0 insertion.
Rat apply_string(int g, const std::vector<int>& d) {
    // d contains at least one 0; remove the last zero.
    std::vector<int> rest = d;
    auto it = std::find(rest.begin(), rest.end(), 0);
    rest.erase(it);
    Rat total(0);
    for (size_t j = 0; j < rest.size(); ++j) {
        if (rest[j] == 0) continue;
        std::vector<int> next = rest;
        next[j] -= 1;
        total += psi_integral_sorted(g, next);
    }
    return total;
}

// Dilaton-free KdV/Virasoro step on the largest exponent.
Rat apply_kdv(int g, const std::vector<int>& d) {
    // d sorted descending, all entries >= 1; recursion on k = d[0] - 1.
    const int k = d[0] - 1;
    std::vector<int> tail(d.begin() + 1, d.end());
    const int m = static_cast<int>(tail.size());

    Rat rhs(0);
    // First sum: merge tau_{k+d_j}.
    for (int j = 0; j < m; ++j) {
        std::vector<int> next = tail;
        next.erase(next.begin() + j);
        next.push_back(k + tail[j]);
        Rat c(double_factorial(2 * k + 2 * tail[j] + 1));
        c /= Rat(double_factorial(2 * tail[j] - 1));
        rhs += c * psi_integral_sorted(g, next);
    }
    // Second sum: boundary terms.
    for (int a = 0; a + 0 <= k - 1; ++a) {
        int b = k - 1 - a;
        Rat c(double_factorial(2 * a + 1) * double_factorial(2 * b + 1));
        // Non-separating.
        if (g >= 1) {
            std::vector<int> next = tail;
            next.push_back(a);
            next.push_back(b);
            rhs += c / 2 * psi_integral_sorted(g - 1, next);
        }
        // Separating, over ordered stable splits.
        for (int g1 = 0; g1 <= g; ++g1) {
            int g2 = g - g1;
            for (long mask = 0; mask < (1L << m); ++mask) {
                std::vector<int> left = {a}, right = {b};
                for (int i = 0; i < m; ++i)
                    ((mask >> i) & 1 ? left : right).push_back(tail[i]);
                if (2 * g1 - 2 + static_cast<int>(left.size()) <= 0) continue;
                if (2 * g2 - 2 + static_cast<int>(right.size()) <= 0) continue;
                rhs += c / 2 * psi_integral_sorted(g1, left) * psi_integral_sorted(g2, right);
            }
        }
    }
    rhs /= Rat(double_factorial(2 * k + 3));
    rhs.canonicalize();
    return rhs;
}

Rat psi_integral_sorted(int g, std::vector<int> d) {
    const int n = static_cast<int>(d.size());
    if (2 * g - 2 + n <= 0)
        throw std::invalid_argument("psi_integral: unstable (g,n)");
    long total = std::accumulate(d.begin(), d.end(), 0L);
    if (total != 3L * g - 3 + n) return 0;

    std::sort(d.rbegin(), d.rend());
    if (g == 0 && n == 3) return 1;
    if (g == 1 && n == 1) return Rat(1, 24);

    const std::string key = "psi:" + psi_key(g, d);
    Rat cached;
    if (IntegralCache::instance().lookup(key, cached)) return cached;

    Rat value = (d.back() == 0) ? apply_string(g, d) : apply_kdv(g, d);
    value.canonicalize();
    IntegralCache::instance().store(key, value);
    return value;
}

}  // namespace

Rat psi_integral(int g, const std::vector<int>& exps) {
    for (int e : exps)
        if (e < 0) return 0;
    return psi_integral_sorted(g, exps);
}

Rat kappa_psi_integral(int g, const std::vector<int>& kappa_parts,
                       const std::vector<int>& psi_exps) {
    const int n = static_cast<int>(psi_exps.size());
    if (2 * g - 2 + n <= 0)
        throw std::invalid_argument("kappa_psi_integral: unstable (g,n)");
    for (int a : kappa_parts)
        if (a < 1) throw std::invalid_argument("kappa index must be >= 1");
    if (kappa_parts.empty()) return psi_integral(g, psi_exps);

    long total = std::accumulate(psi_exps.begin(), psi_exps.end(), 0L) +
                 std::accumulate(kappa_parts.begin(), kappa_parts.end(), 0L);
    if (total != 3L * g - 3 + n) return 0;

    std::vector<int> kp = kappa_parts;
    std::sort(kp.rbegin(), kp.rend());
    std::vector<int> pe = psi_exps;
    std::sort(pe.rbegin(), pe.rend());
    std::string key = "kp:" + std::to_string(g) + "|K";
    for (int a : kp) key += "," + std::to_string(a);
    key += "|P";
    for (int e : pe) key += "," + std::to_string(e);
    Rat cached;
    if (IntegralCache::instance().lookup(key, cached)) return cached;

    // One-step reduction via kappa_a = pi_*(psi_{n+1}^{a+1}):
    // int kappa_{a_1}..kappa_{a_m} prod psi^b
    //   = int_{(g,n+1)} prod psi^b * psi_{n+1}^{a_m+1} * prod_{j<m} (kappa_{a_j} - psi_{n+1}^{a_j}).
    const int am = kp.back();
    std::vector<int> others(kp.begin(), kp.end() - 1);
    Rat total_val(0);
    const int m1 = static_cast<int>(others.size());
    for (long mask = 0; mask < (1L << m1); ++mask) {
        std::vector<int> kept;
        int extra = am + 1;
        int sign = 1;
        for (int j = 0; j < m1; ++j) {
            if ((mask >> j) & 1) {
                extra += others[j];
                sign = -sign;
            } else {
                kept.push_back(others[j]);
            }
        }
        std::vector<int> psis = psi_exps;
        psis.push_back(extra);
        total_val += Rat(sign) * kappa_psi_integral(g, kept, psis);
    }
    total_val.canonicalize();
    IntegralCache::instance().store(key, total_val);
    return total_val;
}

}  // namespace tautring
