#include "tautring/rational.hpp"

#include <mutex>
#include <stdexcept>

namespace tautring {

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rat& r) {
    Rat c = r;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Int factorial(unsigned long n) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

Int double_factorial(long n) {
    if (n <= 0) return 1;  // covers (-1)!! = 1
    Int f;
    mpz_2fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return f;
}

Int binomial(unsigned long n, unsigned long k) {
    if (k > n) return 0;
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

Int multinomial(const std::vector<unsigned long>& parts) {
    unsigned long total = 0;
    for (unsigned long p : parts) total += p;
    Int m = factorial(total);
    for (unsigned long p : parts) m /= factorial(p);
    return m;
}

Rat bernoulli(unsigned n) {
    static std::vector<Rat> table = {Rat(1)};
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    // B_m from sum_{j<=m} C(m+1,j) B_j = 0.
    while (table.size() <= n) {
        unsigned m = static_cast<unsigned>(table.size());
        Rat acc(0);
        for (unsigned j = 0; j < m; ++j) acc += Rat(binomial(m + 1, j)) * table[j];
        Rat bm = -acc / Rat(binomial(m + 1, m));
        bm.canonicalize();
        table.push_back(bm);
    }
    return table[n];
}

}  // namespace tautring
