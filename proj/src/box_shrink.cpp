#include "chromred/box_shrink.hpp"

#include <cmath>
#include <numbers>

#include "chromred/error.hpp"

namespace chromred {

OracleMode parse_oracle_mode(const std::string& s)
{
    if (s == "abs")
        return OracleMode::Abs;
    if (s == "arg")
        return OracleMode::Arg;
    throw ParseError("oracle mode must be abs or arg, got '" + s + "'");
}

Perturbation parse_perturbation(const std::string& s)
{
    if (s == "exact")
        return Perturbation::Exact;
    if (s == "seeded" || s == "seeded-random" || s == "random")
        return Perturbation::SeededRandom;
    if (s == "adversarial")
        return Perturbation::Adversarial;
    throw ParseError("oracle must be exact, seeded or adversarial, got '" + s + "'");
}

std::string to_string(OracleMode m)
{
    return m == OracleMode::Abs ? "abs" : "arg";
}

std::string to_string(Perturbation p)
{
    switch (p) {
    case Perturbation::Exact:
        return "exact";
    case Perturbation::SeededRandom:
        return "seeded";
    case Perturbation::Adversarial:
        return "adversarial";
    }
    return "?";
}

bool ShrinkBox::contains(const GaussianRational& z) const
{
    return abs(z.re() - m.re()) < D && abs(z.im() - m.im()) < D;
}

bool ShrinkBox::contains_closed(const GaussianRational& z) const
{
    return abs(z.re() - m.re()) <= D && abs(z.im() - m.im()) <= D;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter)
{
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + counter + 0x632be59bd9b4e019ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_interval(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

double reduce_angle(double a)
{
    double r = std::remainder(a, 2 * std::numbers::pi);
    return r <= -std::numbers::pi ? r + 2 * std::numbers::pi : r;
}

GaussianRational point_in_disc(const GaussianRational& center, const mpq_class& eps, double dx, double dy,
                               double fraction)
{
    double len = std::hypot(dx, dy);
    if (len == 0 || fraction <= 0)
        return center;
    constexpr int bits = 40;
    double ux = dx / len * fraction, uy = dy / len * fraction;
    mpz_class kx(std::nearbyint(std::ldexp(ux, bits))), ky(std::nearbyint(std::ldexp(uy, bits)));
    mpz_class limit = mpz_class(1) << (2 * bits);
    // Pull back toward the centre until strictly inside the unit disc.
    while (kx * kx + ky * ky >= limit) {
        kx = kx * 1023 / 1024;
        ky = ky * 1023 / 1024;
    }
    auto offset = [&](const mpz_class& k) {
        mpq_class o(k * eps.get_num(), eps.get_den() << bits);
        o.canonicalize();
        return o;
    };
    return center + GaussianRational(offset(kx), offset(ky));
}

LinearOracle::LinearOracle(GaussianRational a, GaussianRational b, OracleMode mode, Perturbation perturbation,
                           std::uint64_t seed)
    : a_(std::move(a)), b_(std::move(b)), mode_(mode), perturbation_(perturbation), seed_(seed)
{
    if (!a_.is_zero()) {
        root_ = -b_ / a_;
        log_abs_a_ = log_abs(a_);
        arg_a_ = arg(a_);
    }
}

double LinearOracle::query(const GaussianRational& y0, const mpq_class& eps)
{
    std::uint64_t h = mix_seed(seed_, counter_++);
    GaussianRational point = y0;
    double shift = 0;

    switch (perturbation_) {
    case Perturbation::Exact:
        break;
    case Perturbation::SeededRandom: {
        double u, v;
        std::uint64_t k = 0;
        do {
            u = unit_interval(mix_seed(h, k++));
            v = unit_interval(mix_seed(h, k++));
        } while (u * u + v * v >= 1);
        point = point_in_disc(y0, eps, u, v, std::hypot(u, v) * (1 - 1e-6));
        shift = kPerturbation * unit_interval(mix_seed(h, ~0ULL));
        break;
    }
    case Perturbation::Adversarial: {
        // Slide to the rim of the ball, radially (abs) or tangentially (arg) relative to the
        // root, and push the value to the edge of the allowed band; signs come from the hash.
        std::complex<double> dir(1, 0);
        if (!a_.is_zero()) {
            std::complex<double> to_root = to_complex(-b_ / a_ - y0);
            if (std::abs(to_root) > 0)
                dir = to_root;
        } else {
            dir = std::polar(1.0, std::numbers::pi * unit_interval(h >> 3));
        }
        if (mode_ == OracleMode::Arg)
            dir *= std::complex<double>(0, 1);
        if (h & 1)
            dir = -dir;
        point = point_in_disc(y0, eps, dir.real(), dir.imag(), 1 - 1e-6);
        shift = (h & 2) ? kPerturbation : -kPerturbation;
        break;
    }
    }
    last_point_ = point;

    // f(point) = A (point - root) avoids the cancellation-heavy A point + B.
    GaussianRational value = a_.is_zero() ? b_ : point - root_;
    if (value.is_zero()) {
        // Any reading is legal for a zero value.
        return mode_ == OracleMode::Abs ? 4 * unit_interval(h) : std::numbers::pi * unit_interval(h);
    }
    if (mode_ == OracleMode::Abs)
        return log_abs(value) + (a_.is_zero() ? 0 : log_abs_a_) + shift;
    return reduce_angle(arg(value) + (a_.is_zero() ? 0 : arg_a_) + shift);
}

namespace {

bool in_open(double x, double lo, double hi)
{
    return lo < x && x < hi;
}

} // namespace

ZeroTest zero_test(ApproxOracle& oracle, const mpq_class& C)
{
    mpq_class c2 = C * C;
    if (oracle.mode() == OracleMode::Abs) {
        // Every point of B(6C^2, C^2/2) has modulus above 5C^2, so A != 0 reads above log 2C.
        double r = oracle.query(GaussianRational(mpq_class(6 * c2)), mpq_class(c2 / 2));
        return r < std::numbers::ln2 + log_abs(C) ? ZeroTest::IsZero : ZeroTest::NonZero;
    }
    mpq_class eps = c2 / 10;
    double f1 = oracle.query(GaussianRational(mpq_class(-5 * c2)), eps);
    double f2 = oracle.query(GaussianRational(mpq_class(5 * c2)), eps);
    double d = reduce_angle(f2 - f1);
    return in_open(d, -std::numbers::pi / 4, std::numbers::pi / 4) ? ZeroTest::IsZero : ZeroTest::NonZero;
}

ShrinkBox shrink_step(const ShrinkBox& box, ApproxOracle& oracle)
{
    const mpq_class eps = box.D / 10;
    const mpq_class c = 5 * box.D / 4;
    const GaussianRational& m = box.m;
    double f1 = oracle.query(m - GaussianRational(c), eps);
    double f2 = oracle.query(m + GaussianRational(c), eps);
    double f3 = oracle.query(m - GaussianRational(0, c), eps);
    double f4 = oracle.query(m + GaussianRational(0, c), eps);

    const mpq_class s = box.D / 8;
    mpq_class dre, dim;
    if (oracle.mode() == OracleMode::Abs) {
        dre = f1 <= f2 ? mpq_class(-s) : s;   // drop the right or the left strip
        dim = f3 <= f4 ? mpq_class(-s) : s;   // drop the top or the bottom strip
    } else {
        dim = in_open(reduce_angle(f1 - f2), 0, std::numbers::pi) ? mpq_class(-s) : s;
        dre = in_open(reduce_angle(f3 - f4), 0, std::numbers::pi) ? s : mpq_class(-s);
    }
    return {m + GaussianRational(dre, dim), 7 * box.D / 8};
}

std::size_t shrink_steps_needed(const mpq_class& C, const mpq_class& delta)
{
    if (sgn(C) <= 0 || sgn(delta) <= 0)
        throw PreconditionError("C and delta must be positive");
    mpq_class start = C * C;
    auto ok = [&](std::size_t n) {
        mpz_class p7, p8;
        mpz_ui_pow_ui(p7.get_mpz_t(), 7, n);
        mpz_ui_pow_ui(p8.get_mpz_t(), 8, n);
        return 2 * start * p7 <= delta * p8;
    };
    double est = (log_abs(start) + std::log(2.0) - log_abs(delta)) / std::log(8.0 / 7.0);
    std::size_t n = est <= 0 ? 0 : static_cast<std::size_t>(std::ceil(est));
    while (n > 0 && ok(n - 1))
        --n;
    while (!ok(n))
        ++n;
    return n;
}

LocalizeOutcome localize(ApproxOracle& oracle, const mpq_class& C, const mpq_class& delta,
                         const BoxObserver& observe)
{
    std::size_t n = shrink_steps_needed(C, delta);
    if (zero_test(oracle, C) == ZeroTest::IsZero)
        return ZeroA{};
    ShrinkBox box{GaussianRational(0), C * C};
    if (observe)
        observe(0, box);
    for (std::size_t k = 1; k <= n; ++k) {
        box = shrink_step(box, oracle);
        if (observe)
            observe(k, box);
    }
    return Localized{box.m, box, n};
}

} // namespace chromred
