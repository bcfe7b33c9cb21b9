#include <doctest.h>

#include <random>

#include "chromred/error.hpp"
#include "chromred/exact_eval.hpp"
#include "chromred/interaction.hpp"
#include "test_support.hpp"

using namespace chromred;

TEST_CASE("f_q basics")
{
    GaussianRational q(2, 1);
    CHECK(f_q(0, q) == ExtendedValue(1 - q));
    CHECK(f_q(1, q).is_infinite());
    CHECK(f_q(ExtendedValue::infinity(), q) == ExtendedValue(1));
    std::mt19937_64 rng(1);
    for (int k = 0; k < 500; ++k) {
        GaussianRational z = testing::random_gaussian(rng), qq = testing::random_gaussian(rng);
        if (qq.is_zero())
            continue;
        CHECK(f_q(f_q(z, qq), qq) == ExtendedValue(z));
    }
    CHECK_THROWS_AS(f_q(2, GaussianRational(0)), ParameterDegenerate);
}

TEST_CASE("value-level laws follow from the state identities")
{
    std::mt19937_64 rng(2);
    int checked = 0;
    for (int k = 0; k < 300; ++k) {
        GaussianRational q = testing::random_gaussian(rng), y = testing::random_gaussian(rng);
        if (q.is_zero() || q == GaussianRational(1))
            continue;
        SpExpr a = testing::random_sp(rng, 1 + rng() % 5), b = testing::random_sp(rng, 1 + rng() % 5);
        ExactState sa = sp_state(a, q, y), sb = sp_state(b, q, y);
        if ((sa.dif.is_zero() && sa.same.is_zero()) || (sb.dif.is_zero() && sb.same.is_zero()))
            continue;
        ExtendedValue ya = y_eff(sa, q), yb = y_eff(sb, q);

        ExactState par = compose_parallel(sa, sb, q);
        CHECK(par == sp_state(SpExpr::parallel(a, b), q, y));
        bool par_exceptional = (ya == ExtendedValue(0) && yb.is_infinite()) || (yb == ExtendedValue(0) && ya.is_infinite());
        if (!par_exceptional && !(par.same.is_zero() && par.dif.is_zero())) {
            CHECK(y_eff(par, q) == parallel_law(ya, yb));
            ++checked;
        }

        ExactState ser = compose_series(sa, sb, q);
        CHECK(ser == sp_state(SpExpr::series(a, b), q, y));
        CHECK(ser.z() * q == sa.z() * sb.z());
        ExtendedValue one(1), special(1 - q);
        bool ser_exceptional = (ya == one && yb == special) || (yb == one && ya == special);
        if (!ser_exceptional && !(ser.same.is_zero() && ser.dif.is_zero()))
            CHECK(y_eff(ser, q) == series_law(ya, yb, q));
    }
    CHECK(checked > 100);
}

TEST_CASE("exceptional pairs are reported")
{
    GaussianRational q(2, 1);
    CHECK_THROWS_AS(parallel_law(0, ExtendedValue::infinity()), ExceptionalPair);
    CHECK_THROWS_AS(series_law(1, 1 - q, q), ExceptionalPair);
    CHECK(parallel_law(2, ExtendedValue::infinity()).is_infinite());
}

TEST_CASE("hard-core set membership")
{
    GaussianRational q(2, 1);
    CHECK(in_hstar(edge_state(q, GaussianRational(0)), q));
    CHECK(!in_hstar(edge_state(q, GaussianRational(1)), q));
    ExactState zero_dif{GaussianRational(1), GaussianRational(0)};
    CHECK(!in_hstar(zero_dif, q));
}

TEST_CASE("the base map g")
{
    GaussianRational q(2, 1);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        GaussianRational yb = testing::random_gaussian(rng), z = testing::random_gaussian(rng);
        if (yb == GaussianRational(1))
            continue;
        // Definition through f_q, where it is not degenerate.
        ExtendedValue fz = f_q(z, q), fy = f_q(yb, q);
        if (!fz.is_infinite() && !fy.is_infinite() && !(fz.value() * fy.value() == GaussianRational(1)))
            CHECK(g_map(z, q, yb) == f_q(fz.value() * fy.value(), q));
        CHECK(g_map(1, q, yb) == ExtendedValue(1));
        CHECK(g_map(1 - q, q, yb) == ExtendedValue(1 - q));
    }
    // g is the effective value of a two-terminal graph joined in series with the base.
    SpExpr base = parse_sp("(S e (S e e))"), inner = parse_sp("(P e (S e e))");
    GaussianRational y = 0;
    ExactState sb = sp_state(base, q, y), si = sp_state(inner, q, y);
    CHECK(g_map(y_eff(si, q), q, y_eff(sb, q).value()) ==
          y_eff(sp_state(SpExpr::series(inner, base), q, y), q));

    // g'(1) = 1 / f_q(y_base), checked by a difference quotient with h = 1e-6.
    GaussianRational yb = y_eff(sb, q).value();
    mpq_class h(1, 1000000);
    GaussianRational quotient = (g_map(1 + GaussianRational(h), q, yb).value() - 1) / GaussianRational(h);
    GaussianRational expected = 1 / f_q(yb, q).value();
    CHECK(std::abs(to_complex(quotient - expected)) < 1e-5);
}
