#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace tautring {

// Exact rational scalar used throughout the library.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "p/q" or "p"; throws std::invalid_argument on malformed input or q = 0.
Rat rat_from_string(const std::string& s);

// Canonical form "p/q", or just "p" when the denominator is 1.
std::string rat_to_string(const Rat& r);

Int factorial(unsigned long n);

// (2k-1)!! style double factorial; (-1)!! = 1 and 0!! = 1.
Int double_factorial(long n);

Int binomial(unsigned long n, unsigned long k);

// n! / (parts[0]! * parts[1]! * ...) where n = sum of parts.
Int multinomial(const std::vector<unsigned long>& parts);

// Bernoulli number B_n with the convention B_1 = -1/2 (only even n are used
// downstream: B_2 = 1/6, B_4 = -1/30, ...).
Rat bernoulli(unsigned n);

}  // namespace tautring
