#include "joinbound/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace joinbound {

Rat rat_from_string(const std::string& s) {
    if (s.empty())
        throw std::invalid_argument("empty rational literal");
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("malformed rational literal: '" + s + "'");
    if (sgn(r.get_den()) == 0)
        throw std::invalid_argument("zero denominator in rational literal: '" + s + "'");
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& r) {
    return r.get_str();
}

double rat_to_double(const Rat& r) {
    return r.get_d();
}

BigInt factorial(long n) {
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n < 0 ? 0 : n));
    return f;
}

BigInt binomial(long n, long k) {
    if (k < 0 || k > n)
        return BigInt(0);
    BigInt b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return b;
}

double log2_bigint(const BigInt& n) {
    signed long exp = 0;
    double d = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log2(d) + static_cast<double>(exp);
}

} // namespace joinbound
