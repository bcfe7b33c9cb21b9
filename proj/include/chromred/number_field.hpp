#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace chromred {

/// Exact element of Q(i). Components are always canonical (gmp keeps them reduced).
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long re) : re_(re) {}
    GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational i() { return {0, 1}; }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    GaussianRational conj() const { return {re_, -im_}; }

    GaussianRational& operator+=(const GaussianRational& o);
    GaussianRational& operator-=(const GaussianRational& o);
    GaussianRational& operator*=(const GaussianRational& o);
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    mpq_class re_;
    mpq_class im_;
};

mpq_class abs_sq(const GaussianRational& z);
GaussianRational pow(GaussianRational z, unsigned long n);

/// Accepts `a/b+c/d*i`, `a`, `c/d*i`, `i`, `-i`, `2+i` and the like.
GaussianRational parse_gaussian(std::string_view text);
mpq_class parse_rational(std::string_view text);
std::string to_string(const GaussianRational& z);
std::ostream& operator<<(std::ostream& os, const GaussianRational& z);

// Floating views that survive magnitudes far outside the double range.
std::complex<double> to_complex(const GaussianRational& z);
double log_abs(const mpq_class& x);          // -inf for zero
double log_abs(const GaussianRational& z);   // -inf for zero
double arg(const GaussianRational& z);       // in (-pi, pi], 0 for zero
GaussianRational from_complex(std::complex<double> z);

/// Gaussian rational with every component of the form k / 2^bits, rounded toward -inf.
GaussianRational round_dyadic(const GaussianRational& z, unsigned long bits);
mpq_class round_dyadic(const mpq_class& x, unsigned long bits);

mpq_class pow2(long e);

/// Primitive integer minimal polynomial, coefficients from constant term upward.
std::vector<mpz_class> minimal_polynomial(const GaussianRational& a);
int algebraic_degree(const GaussianRational& a);

// Polynomial heights. All are taken on the coefficient vector as given.
mpz_class poly_height(const std::vector<mpz_class>& p);   // H(p): max |coefficient|
mpz_class poly_length(const std::vector<mpz_class>& p);   // L(p): sum |coefficient|
double log_mahler_measure(const std::vector<mpz_class>& p);
double log_height(const GaussianRational& a);              // h(a) = log M(min poly) / deg

struct HeightBudget {
    int d = 1;               // d(q) * d(y)
    double h_q = 0;
    double h_y = 0;
    double log_c = 0;        // |Z(G)| is 0 or in [1/C, C]
    double log_h = 0;        // heights of ratios stay below H
    double log_delta_inv = 0;

    mpq_class c() const;            // dyadic C >= exp(log_c)
    mpq_class delta() const;        // dyadic delta <= exp(-log_delta_inv)
    mpz_class denom_bound() const;  // integer >= exp(log_h)
};

HeightBudget height_budget(const GaussianRational& q, const GaussianRational& y, std::size_t n,
                           std::size_t m);

/// Simplest rational strictly inside (lo, hi).
mpq_class simplest_between(const mpq_class& lo, const mpq_class& hi);

/// The unique Gaussian rational with component denominators <= denom_bound in the open box of
/// the given half-width around center. Throws NoCandidate if there is none.
GaussianRational rational_reconstruct(const GaussianRational& center, const mpq_class& half_width,
                                      const mpz_class& denom_bound);

} // namespace chromred
