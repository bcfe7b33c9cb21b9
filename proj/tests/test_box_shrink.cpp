#include <doctest.h>

#include <cmath>
#include <random>

#include "chromred/box_shrink.hpp"
#include "test_support.hpp"

using namespace chromred;

namespace {

// A random nonzero Gaussian rational with components k/4, |k| <= 5, so 1/8 <= |z| <= 8.
GaussianRational small_nonzero(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> k(-5, 5);
    while (true) {
        mpq_class re(k(rng), 4), im(k(rng), 4);
        re.canonicalize();
        im.canonicalize();
        GaussianRational z(re, im);
        if (!z.is_zero())
            return z;
    }
}

// Checks that the root stays in every box of a localisation run.
struct ContainmentCheck {
    GaussianRational root;
    std::size_t violations = 0;
    std::size_t steps = 0;
    mpq_class start;

    void operator()(std::size_t k, const ShrinkBox& box)
    {
        steps = k;
        bool inside = k == 0 ? box.contains_closed(root) : box.contains(root);
        if (!inside)
            ++violations;
        mpz_class p7, p8;
        mpz_ui_pow_ui(p7.get_mpz_t(), 7, k);
        mpz_ui_pow_ui(p8.get_mpz_t(), 8, k);
        if (box.D != start * p7 / p8)
            ++violations;
    }
};

} // namespace

TEST_CASE("zero test examples")
{
    LinearOracle zero_abs(0, 1, OracleMode::Abs, Perturbation::Adversarial, 3);
    CHECK(zero_test(zero_abs, 2) == ZeroTest::IsZero);
    LinearOracle one_abs(1, 0, OracleMode::Abs, Perturbation::Adversarial, 3);
    CHECK(zero_test(one_abs, 1) == ZeroTest::NonZero);
    LinearOracle zero_arg(0, GaussianRational(0, 1), OracleMode::Arg, Perturbation::Adversarial, 3);
    CHECK(zero_test(zero_arg, 1) == ZeroTest::IsZero);
    LinearOracle one_arg(1, 0, OracleMode::Arg, Perturbation::SeededRandom, 3);
    CHECK(zero_test(one_arg, 1) == ZeroTest::NonZero);
}

TEST_CASE("one step")
{
    LinearOracle f(1, 0, OracleMode::Abs, Perturbation::Exact);
    ShrinkBox box{0, 1};
    ShrinkBox next = shrink_step(box, f);
    CHECK(next.D == mpq_class(7, 8));
    CHECK(next.contains(0));
    // Ties fall to the first branch: right and top strips removed.
    CHECK(next.m == GaussianRational(mpq_class(-1, 8), mpq_class(-1, 8)));

    // Root in the lower right corner: the opposite strips go.
    LinearOracle g(1, parse_gaussian("-1/2+1/2*i"), OracleMode::Abs, Perturbation::Exact);
    CHECK(shrink_step(box, g).m == GaussianRational(mpq_class(1, 8), mpq_class(-1, 8)));
    LinearOracle h(1, parse_gaussian("-1/2+1/2*i"), OracleMode::Arg, Perturbation::Exact);
    CHECK(shrink_step(box, h).m == GaussianRational(mpq_class(1, 8), mpq_class(-1, 8)));

    // Arg-mode tie (difference 0 is not in (0, pi)): bottom strip removed.
    struct Constant : ApproxOracle {
        OracleMode mode() const override { return OracleMode::Arg; }
        double query(const GaussianRational&, const mpq_class&) override { return 0.5; }
    } flat;
    CHECK(shrink_step(box, flat).m.im() == mpq_class(1, 8));
}

TEST_CASE("localize the root 2+i")
{
    LinearOracle f(1, parse_gaussian("-2-1*i"), OracleMode::Abs, Perturbation::Exact);
    mpq_class delta(1, 1 << 30);
    auto out = localize(f, 4, delta);
    REQUIRE(std::holds_alternative<Localized>(out));
    const auto& loc = std::get<Localized>(out);
    CHECK(loc.box.D <= delta / 2);
    CHECK(loc.box.contains(GaussianRational(2, 1)));
    CHECK(loc.steps == shrink_steps_needed(4, delta));
    CHECK(loc.steps == static_cast<std::size_t>(std::ceil(std::log(2.0 * 16 / std::ldexp(1.0, -30)) / std::log(8.0 / 7.0))));

    for (auto mode : {OracleMode::Abs, OracleMode::Arg}) {
        LinearOracle z(0, 5, mode, Perturbation::SeededRandom, 9);
        CHECK(std::holds_alternative<ZeroA>(localize(z, 8, delta)));
    }
}

TEST_CASE("containment under hostile oracles")
{
    std::mt19937_64 rng(2024);
    mpq_class C = 8, delta(1, 1 << 20);
    for (int k = 0; k < 60; ++k) {
        GaussianRational a = small_nonzero(rng);
        GaussianRational b = rng() % 5 == 0 ? GaussianRational(0) : small_nonzero(rng);
        for (auto mode : {OracleMode::Abs, OracleMode::Arg})
            for (auto p : {Perturbation::Exact, Perturbation::SeededRandom, Perturbation::Adversarial}) {
                LinearOracle f(a, b, mode, p, rng());
                CountingOracle counted(f);
                ContainmentCheck check{-b / a, 0, 0, C * C};
                auto out = localize(counted, C, delta, std::ref(check));
                REQUIRE(std::holds_alternative<Localized>(out));
                CHECK(check.violations == 0);
                std::size_t n = shrink_steps_needed(C, delta);
                CHECK(counted.count() == 4 * n + (mode == OracleMode::Abs ? 1 : 2));
            }
    }
}

TEST_CASE("simulated readings are legal")
{
    std::mt19937_64 rng(5);
    for (auto p : {Perturbation::SeededRandom, Perturbation::Adversarial})
        for (int k = 0; k < 200; ++k) {
            GaussianRational a = small_nonzero(rng), b = small_nonzero(rng), y0 = small_nonzero(rng);
            mpq_class eps(1, 16);
            LinearOracle fa(a, b, OracleMode::Abs, p, k);
            double r = fa.query(y0, eps);
            GaussianRational at = fa.last_point();
            CHECK(abs_sq(at - y0) < eps * eps);
            double lv = log_abs(a * at + b);
            CHECK(std::abs(r - lv) <= 0.25);

            LinearOracle fg(a, b, OracleMode::Arg, p, k);
            double t = fg.query(y0, eps);
            CHECK(std::abs(reduce_angle(t - arg(a * fg.last_point() + b))) <= 0.25);
        }
}
