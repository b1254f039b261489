#pragma once

#include <gmpxx.h>

#include <string>

namespace joinbound {

// Exact arithmetic everywhere a spec equality must hold bit-exactly.
// mpq_class is always canonical: lowest terms, positive denominator.
using Rat = mpq_class;
using BigInt = mpz_class;

// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input.
Rat rat_from_string(const std::string& s);

// Renders canonical "p/q" (or "p" when the denominator is 1).
std::string rat_to_string(const Rat& r);

double rat_to_double(const Rat& r);

BigInt factorial(long n);

// C(n, k) as an exact big integer; 0 when k < 0 or k > n.
BigInt binomial(long n, long k);

// log2 of a positive big integer, accurate to double precision.
double log2_bigint(const BigInt& n);

} // namespace joinbound
