#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tautring/rational.hpp"

namespace tautring {

// <tau_{d_1} ... tau_{d_n}>_g, the integral of prod psi_i^{d_i} over the
// moduli space of genus-g stable curves with n markings. Zero unless
// sum d_i = 3g-3+n. Requires 2g-2+n > 0.
Rat psi_integral(int g, const std::vector<int>& exps);

// Integral of prod_j kappa_{a_j} * prod_i psi_i^{b_i}; kappa arguments are
// passed as the multiset of indices a_j >= 1 ("parts").
Rat kappa_psi_integral(int g, const std::vector<int>& kappa_parts,
                       const std::vector<int>& psi_exps);

// Process-wide memo for the two integral families, with disk round-tripping
// through the JSON cache document and hit counters for instrumentation.
class IntegralCache {
public:
    static IntegralCache& instance();

    bool lookup(const std::string& key, Rat& out);
    void store(const std::string& key, const Rat& value);

    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }

    // Only psi-integral entries are persisted; kappa entries rebuild cheaply.
    std::map<std::string, std::string> psi_entries() const;
    void merge_psi_entries(const std::map<std::string, std::string>& entries);

private:
    IntegralCache() = default;
    mutable std::mutex mtx_;
    std::map<std::string, Rat> table_;
    std::uint64_t hits_ = 0, misses_ = 0;
};

std::string psi_key(int g, const std::vector<int>& sorted_exps);

}  // namespace tautring
