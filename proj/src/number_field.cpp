#include "chromred/number_field.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "chromred/error.hpp"

namespace chromred {

GaussianRational& GaussianRational::operator+=(const GaussianRational& o)
{
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o)
{
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o)
{
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o)
{
    if (o.is_zero())
        throw PreconditionError("division by zero in Q(i)");
    if (sgn(o.im_) == 0) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    mpq_class n = abs_sq(o);
    mpq_class re = (re_ * o.re_ + im_ * o.im_) / n;
    im_ = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(re);
    return *this;
}

mpq_class abs_sq(const GaussianRational& z)
{
    return z.re() * z.re() + z.im() * z.im();
}

GaussianRational pow(GaussianRational z, unsigned long n)
{
    GaussianRational r(1);
    while (n) {
        if (n & 1)
            r *= z;
        n >>= 1;
        if (n)
            z *= z;
    }
    return r;
}

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

std::string strip_spaces(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(c);
    return s;
}

} // namespace

mpq_class parse_rational(std::string_view text)
{
    std::string s = strip_spaces(text);
    bool neg = false;
    std::string_view body = s;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
        neg = body[0] == '-';
        body.remove_prefix(1);
    }
    auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
        throw ParseError("not a rational: '" + std::string(text) + "'");
    mpq_class r;
    r.get_num() = mpz_class(std::string(num));
    r.get_den() = mpz_class(std::string(den));
    if (sgn(r.get_den()) == 0)
        throw ParseError("zero denominator: '" + std::string(text) + "'");
    r.canonicalize();
    return neg ? mpq_class(-r) : r;
}

GaussianRational parse_gaussian(std::string_view text)
{
    std::string s = strip_spaces(text);
    if (s.empty())
        throw ParseError("empty Gaussian rational");
    if (s.back() != 'i')
        return {parse_rational(s), 0};

    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;)
        if (s[k] == '+' || s[k] == '-') {
            split = k;
            break;
        }
    std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
    std::string im_part = split == std::string::npos ? s : s.substr(split);
    im_part.pop_back();
    if (!im_part.empty() && im_part.back() == '*')
        im_part.pop_back();
    mpq_class im;
    if (im_part.empty() || im_part == "+")
        im = 1;
    else if (im_part == "-")
        im = -1;
    else
        im = parse_rational(im_part);
    mpq_class re = re_part.empty() ? mpq_class(0) : parse_rational(re_part);
    return {re, im};
}

std::string to_string(const GaussianRational& z)
{
    std::ostringstream os;
    if (z.is_real()) {
        os << z.re();
    } else if (sgn(z.re()) == 0) {
        os << z.im() << "*i";
    } else {
        os << z.re() << (sgn(z.im()) < 0 ? "-" : "+") << abs(z.im()) << "*i";
    }
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& z)
{
    return os << to_string(z);
}

namespace {

// x = mantissa * 2^exp with |mantissa| in [0.5, 2) or 0.
struct Scaled {
    double mantissa = 0;
    long exp = 0;
};

Scaled scaled(const mpq_class& x)
{
    if (sgn(x) == 0)
        return {};
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, x.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
    return {mn / md, en - ed};
}

// Both components scaled to a shared exponent.
std::pair<std::complex<double>, long> scaled(const GaussianRational& z)
{
    Scaled a = scaled(z.re());
    Scaled b = scaled(z.im());
    if (a.mantissa == 0 && b.mantissa == 0)
        return {{0, 0}, 0};
    long e = a.mantissa == 0 ? b.exp : b.mantissa == 0 ? a.exp : std::max(a.exp, b.exp);
    return {{std::ldexp(a.mantissa, static_cast<int>(std::max(a.exp - e, -2000L))),
             std::ldexp(b.mantissa, static_cast<int>(std::max(b.exp - e, -2000L)))},
            e};
}

} // namespace

std::complex<double> to_complex(const GaussianRational& z)
{
    return {z.re().get_d(), z.im().get_d()};
}

double log_abs(const mpq_class& x)
{
    if (sgn(x) == 0)
        return -std::numeric_limits<double>::infinity();
    Scaled s = scaled(x);
    return std::log(std::abs(s.mantissa)) + static_cast<double>(s.exp) * std::numbers::ln2;
}

double log_abs(const GaussianRational& z)
{
    if (z.is_zero())
        return -std::numeric_limits<double>::infinity();
    auto [c, e] = scaled(z);
    return std::log(std::abs(c)) + static_cast<double>(e) * std::numbers::ln2;
}

double arg(const GaussianRational& z)
{
    if (z.is_zero())
        return 0;
    auto [c, e] = scaled(z);
    (void)e;
    return std::arg(c);
}

GaussianRational from_complex(std::complex<double> z)
{
    return {mpq_class(z.real()), mpq_class(z.imag())};
}

mpq_class pow2(long e)
{
    mpq_class r(1);
    if (e >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    return r;
}

mpq_class round_dyadic(const mpq_class& x, unsigned long bits)
{
    mpz_class scaled_num;
    mpz_mul_2exp(scaled_num.get_mpz_t(), x.get_num_mpz_t(), bits);
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), scaled_num.get_mpz_t(), x.get_den_mpz_t());
    mpq_class r(k);
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), bits);
    r.canonicalize();
    return r;
}

GaussianRational round_dyadic(const GaussianRational& z, unsigned long bits)
{
    return {round_dyadic(z.re(), bits), round_dyadic(z.im(), bits)};
}

std::vector<mpz_class> minimal_polynomial(const GaussianRational& a)
{
    if (a.is_real())
        return {-a.re().get_num(), a.re().get_den()};
    // x^2 - 2 Re(a) x + |a|^2, cleared of denominators and made primitive.
    mpq_class c0 = abs_sq(a);
    mpq_class c1 = -2 * a.re();
    mpz_class l;
    mpz_lcm(l.get_mpz_t(), c0.get_den_mpz_t(), c1.get_den_mpz_t());
    std::vector<mpz_class> p{mpz_class(c0 * l), mpz_class(c1 * l), l};
    mpz_class g = 0;
    for (auto& c : p)
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    for (auto& c : p)
        c /= g;
    return p;
}

int algebraic_degree(const GaussianRational& a)
{
    return a.is_real() ? 1 : 2;
}

mpz_class poly_height(const std::vector<mpz_class>& p)
{
    mpz_class h = 0;
    for (const auto& c : p)
        if (abs(c) > h)
            h = abs(c);
    return h;
}

mpz_class poly_length(const std::vector<mpz_class>& p)
{
    mpz_class l = 0;
    for (const auto& c : p)
        l += abs(c);
    return l;
}

double log_mahler_measure(const std::vector<mpz_class>& p)
{
    std::size_t deg = p.size() - 1;
    while (deg > 0 && sgn(p[deg]) == 0)
        --deg;
    double lead = log_abs(mpq_class(p[deg]));
    if (deg == 0)
        return lead;
    // M(p) = |a_d| prod max(1, |root|); roots found in closed form.
    std::vector<std::complex<double>> roots;
    if (deg == 1) {
        double r = std::exp(log_abs(mpq_class(p[0])) - lead);
        roots.push_back(r);
    } else if (deg == 2) {
        std::complex<double> a = p[2].get_d(), b = p[1].get_d(), c = p[0].get_d();
        std::complex<double> disc = std::sqrt(b * b - 4.0 * a * c);
        roots.push_back((-b + disc) / (2.0 * a));
        roots.push_back((-b - disc) / (2.0 * a));
    } else {
        throw PreconditionError("Mahler measure only implemented for degree <= 2");
    }
    double m = lead;
    for (auto r : roots)
        m += std::max(0.0, std::log(std::abs(r)));
    return m;
}

double log_height(const GaussianRational& a)
{
    auto p = minimal_polynomial(a);
    return log_mahler_measure(p) / static_cast<double>(p.size() - 1);
}

namespace {

long ceil_log2(double log_value)
{
    return static_cast<long>(std::ceil(log_value / std::numbers::ln2 + 1e-9));
}

} // namespace

mpq_class HeightBudget::c() const
{
    return pow2(std::max(0L, ceil_log2(log_c)));
}

mpq_class HeightBudget::delta() const
{
    return pow2(-std::max(1L, ceil_log2(log_delta_inv)));
}

mpz_class HeightBudget::denom_bound() const
{
    double bits = log_h / std::numbers::ln2;
    if (bits < 52) {
        return mpz_class(static_cast<unsigned long>(std::ceil(std::exp(log_h))) + 1);
    }
    long k = static_cast<long>(std::floor(bits)) - 52;
    mpz_class m(std::ceil(std::exp2(bits - static_cast<double>(k))) + 1);
    mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return m;
}

HeightBudget height_budget(const GaussianRational& q, const GaussianRational& y, std::size_t n,
                           std::size_t m)
{
    HeightBudget b;
    b.d = algebraic_degree(q) * algebraic_degree(y);
    b.h_q = log_height(q);
    b.h_y = log_height(y);
    double dn = static_cast<double>(n), dm = static_cast<double>(m), d = b.d;
    b.log_c = (dn * b.h_q + dm * b.h_y + 2 * dm * std::numbers::ln2) * d;
    b.log_h = 2 * b.log_c;
    b.log_delta_inv = (d * d + 5 * d) + 2 * d * b.log_h;
    return b;
}

mpq_class simplest_between(const mpq_class& lo, const mpq_class& hi)
{
    if (!(lo < hi))
        throw PreconditionError("simplest_between: empty interval");
    if (sgn(lo) < 0 && sgn(hi) > 0)
        return 0;
    if (sgn(hi) <= 0)
        return -simplest_between(-hi, -lo);

    // 0 <= lo < hi: build the continued fraction of the simplest element.
    std::vector<mpz_class> terms;
    mpq_class a = lo, b = hi;
    while (true) {
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
        if (mpq_class(fl + 1) < b) {
            terms.push_back(fl + 1);
            break;
        }
        terms.push_back(fl);
        if (a == mpq_class(fl)) {
            mpq_class t = 1 / (b - fl);
            mpz_class ft;
            mpz_fdiv_q(ft.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
            terms.push_back(ft + 1);
            break;
        }
        mpq_class na = 1 / (b - fl);
        mpq_class nb = 1 / (a - fl);
        a = std::move(na);
        b = std::move(nb);
    }
    mpq_class x(terms.back());
    for (std::size_t k = terms.size() - 1; k-- > 0;)
        x = terms[k] + 1 / x;
    return x;
}

GaussianRational rational_reconstruct(const GaussianRational& center, const mpq_class& half_width,
                                      const mpz_class& denom_bound)
{
    if (sgn(half_width) <= 0)
        throw PreconditionError("rational_reconstruct: half-width must be positive");
    if (!(2 * half_width * denom_bound * denom_bound < 1))
        throw PreconditionError("rational_reconstruct: half-width too large for the denominator bound");
    auto component = [&](const mpq_class& c) {
        mpq_class r = simplest_between(c - half_width, c + half_width);
        if (r.get_den() > denom_bound)
            throw NoCandidate("no rational with denominator <= bound in the box");
        return r;
    };
    return {component(center.re()), component(center.im())};
}

} // namespace chromred
