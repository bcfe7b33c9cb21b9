#include "chromred/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <unordered_set>

#include "chromred/error.hpp"
#include "chromred/exact_eval.hpp"

namespace chromred {

namespace {

using cplx = std::complex<double>;

GaussInt mul(const GaussInt& x, const GaussInt& y)
{
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

GaussInt add(const GaussInt& x, const GaussInt& y)
{
    return {x.re + y.re, x.im + y.im};
}

GaussInt scale(const GaussInt& x, const mpz_class& k)
{
    return {x.re * k, x.im * k};
}

bool equal(const GaussInt& x, const GaussInt& y)
{
    return x.re == y.re && x.im == y.im;
}

mpz_class common_den(std::initializer_list<const GaussianRational*> zs)
{
    mpz_class l = 1;
    for (const auto* z : zs) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), z->re().get_den_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), z->im().get_den_mpz_t());
    }
    return l;
}

// z * den, which must be a Gaussian integer.
GaussInt numer(const GaussianRational& z, const mpz_class& den)
{
    return {mpz_class(z.re().get_num() * (den / z.re().get_den())),
            mpz_class(z.im().get_num() * (den / z.im().get_den()))};
}

// x = n / d with n a Gaussian integer and d > 0.
struct Fraction {
    GaussInt n;
    mpz_class d;
};

Fraction as_fraction(const GaussianRational& z)
{
    mpz_class d = common_den({&z});
    return {numer(z, d), d};
}

GaussianRational ratio(const GaussInt& n, const mpz_class& d)
{
    mpq_class re(n.re, d), im(n.im, d);
    re.canonicalize();
    im.canonicalize();
    return {re, im};
}

// y_eff of a projective state equals exactly 1.
bool is_unit_interaction(const ProjectiveState& v, const Fraction& qm1)
{
    return equal(mul(qm1.n, v.same), scale(v.dif, qm1.d));
}

mpz_class norm(const GaussInt& z)
{
    return z.re * z.re + z.im * z.im;
}

// v is in H* and |y_eff(v) - t| < eps, decided without reducing v.
bool projective_close(const ProjectiveState& v, const GaussianRational& q, const GaussianRational& t,
                      const mpq_class& eps)
{
    if (v.dif.re == 0 && v.dif.im == 0)
        return false;
    Fraction qm1 = as_fraction(q - 1), tf = as_fraction(t);
    GaussInt lead = mul(qm1.n, v.same);
    if (equal(lead, scale(v.dif, qm1.d)))
        return false;
    // y - t = (qm1.n S td - t.n D qd) / (qd td D)
    GaussInt x = add(scale(lead, tf.d), scale(mul(tf.n, v.dif), -qm1.d));
    mpz_class scale2 = qm1.d * tf.d;
    return norm(x) * eps.get_den() * eps.get_den() < eps.get_num() * eps.get_num() * norm(v.dif) * scale2 * scale2;
}

// n-fold parallel composition of a projective state with itself.
ProjectiveState parallel_power(const ProjectiveState& v, unsigned long n, const GaussianRational& q)
{
    Fraction inv_q = as_fraction(1 / q), inv_qq = as_fraction(1 / (q * (q - 1)));
    auto compose = [&](const ProjectiveState& x, const ProjectiveState& y) {
        ProjectiveState out;
        out.same = scale(mul(mul(x.same, y.same), inv_q.n), inv_qq.d);
        out.dif = scale(mul(mul(x.dif, y.dif), inv_qq.n), inv_q.d);
        out.den = x.den * y.den * inv_q.d * inv_qq.d;
        return out;
    };
    ProjectiveState result = v, base = v;
    bool have = false;
    while (n) {
        if (n & 1) {
            result = have ? compose(result, base) : base;
            have = true;
        }
        n >>= 1;
        if (n)
            base = compose(base, base);
    }
    return result;
}

double abs_d(const GaussianRational& z)
{
    return std::exp(log_abs(z));
}

mpq_class dyadic_below(double x, int bits = 30)
{
    return mpq_class(std::floor(std::ldexp(x, bits))) / mpq_class(mpz_class(1) << bits);
}

} // namespace

ProjectiveState ProjectiveState::from(const ExactState& s)
{
    mpz_class d = common_den({&s.same, &s.dif});
    return {numer(s.same, d), numer(s.dif, d), d};
}

ExactState ProjectiveState::to_state() const
{
    return {ratio(same, den), ratio(dif, den)};
}

StepMatrix StepMatrix::from(const GaussianRational& a, const GaussianRational& b, const GaussianRational& c,
                            const GaussianRational& d)
{
    mpz_class den = common_den({&a, &b, &c, &d});
    return {numer(a, den), numer(b, den), numer(c, den), numer(d, den), den};
}

ProjectiveState StepMatrix::apply(const ProjectiveState& v) const
{
    return {add(mul(a, v.same), mul(b, v.dif)), add(mul(c, v.same), mul(d, v.dif)), v.den * den};
}

BaseGadget find_base_gadget(const GaussianRational& q, const GaussianRational& y, int depth_cap,
                            std::size_t level_cap)
{
    require_nondegenerate(q);
    if (y == GaussianRational(1))
        throw PreconditionError("find_base_gadget needs y != 1");

    struct Item {
        SpExpr expr;
        ExactState state;
    };
    auto good = [&](const ExactState& s) -> std::optional<GaussianRational> {
        if (!in_hstar(s, q))
            return std::nullopt;
        GaussianRational yg = y_eff(s, q).value();
        ExtendedValue w = f_q(yg, q);
        if (w.is_infinite() || w.value().is_real() || !(abs_sq(w.value()) > 1))
            return std::nullopt;
        return yg;
    };

    std::vector<Item> all{{SpExpr::edge(), edge_state(q, y)}};
    std::unordered_set<std::string> seen{to_string(y)};
    if (auto yg = good(all[0].state))
        return {all[0].expr, all[0].state, *yg};

    std::size_t frontier_begin = 0;
    for (int depth = 1; depth <= depth_cap; ++depth) {
        std::size_t frontier_end = all.size();
        std::vector<Item> fresh;
        for (std::size_t i = frontier_begin; i < frontier_end && fresh.size() < level_cap; ++i)
            for (std::size_t j = 0; j < frontier_end && fresh.size() < level_cap; ++j) {
                for (bool series : {true, false}) {
                    ExactState s = series ? compose_series(all[i].state, all[j].state, q)
                                          : compose_parallel(all[i].state, all[j].state, q);
                    if (s.same.is_zero() && s.dif.is_zero())
                        continue;
                    std::string key = to_string(y_eff(s, q));
                    if (!seen.insert(key).second)
                        continue;
                    SpExpr e = series ? SpExpr::series(all[i].expr, all[j].expr)
                                      : SpExpr::parallel(all[i].expr, all[j].expr);
                    if (auto yg = good(s))
                        return {e, s, *yg};
                    fresh.push_back({e, s});
                }
            }
        if (fresh.empty())
            break;
        frontier_begin = frontier_end;
        for (auto& f : fresh)
            all.push_back(std::move(f));
    }
    throw NotFound("no base gadget with |f_q(y_G)| > 1 and non-real f_q(y_G) within depth " +
                   std::to_string(depth_cap));
}

GaussianRational ifs_map(const IfsSystem& sys, std::size_t i, const GaussianRational& z)
{
    return sys.cover.at(i).y * g_map(z, sys.q, sys.base.y).value();
}

GaussianRational ifs_inverse(const IfsSystem& sys, std::size_t i, const GaussianRational& t)
{
    const GaussianRational& yi = sys.cover.at(i).y;
    const GaussianRational& yb = sys.base.y;
    return ((yb + sys.q - 2) * t - yi * (sys.q - 1)) / (yi * yb - t);
}

namespace {

// Image of the disc B(1, rho) under g, as (centre, radius).
std::pair<cplx, double> g_image_disc(const GaussianRational& q, const GaussianRational& yb, double rho)
{
    cplx qc = to_complex(q), y = to_complex(yb);
    cplx p0 = -(y + qc - 2.0);
    cplx kc = (qc - 1.0) - y * (y + qc - 2.0);
    cplx s = 1.0 - p0;
    double den = std::norm(s) - rho * rho;
    return {y + kc * std::conj(s) / den, std::abs(kc) * rho / den};
}

struct Generator {
    SpExpr expr;
    cplx log_value;
};

// Gadgets with interaction near 1: a series power of the seed, optionally padded in series
// with a small gadget X, so that f_q(y) = w0^k f_q(y_X) and y = f_q(w0^k f_q(y_X)).
std::vector<Generator> generators(const IfsSystem& sys, double reach, double finest)
{
    const SpExpr e = SpExpr::edge();
    const std::vector<std::optional<SpExpr>> pads{
        std::nullopt,
        e,
        SpExpr::series(e, e),
        SpExpr::parallel(e, e),
        SpExpr::series(e, SpExpr::series(e, e)),
        SpExpr::parallel(e, SpExpr::parallel(e, e)),
        SpExpr::series(e, SpExpr::parallel(e, e)),
        SpExpr::parallel(e, SpExpr::series(e, e)),
    };
    const cplx qc = to_complex(sys.q), w0 = to_complex(f_q(sys.seed.y, sys.q).value());
    std::vector<Generator> out;
    for (const auto& pad : pads) {
        cplx fx = 1;
        if (pad) {
            ExtendedValue yx = y_eff(sp_state(*pad, sys.q, sys.y), sys.q);
            if (yx.is_infinite() || yx.value() == GaussianRational(1))
                continue;
            fx = f_q(to_complex(yx.value()), qc);
            if (std::abs(fx) == 0)
                continue;
        }
        cplx wk = fx;
        for (unsigned k = 1; k <= 200; ++k) {
            wk *= w0;
            cplx l = std::log(f_q(wk, qc));
            if (std::abs(l) < finest)
                break;
            if (std::abs(l) > reach)
                continue;
            SpExpr x = series_power(sys.seed.expr, k);
            out.push_back({pad ? SpExpr::series(x, *pad) : x, l});
        }
    }
    return out;
}

// Multiset of generators whose log values sum to within `accuracy` of `target`, by beam search.
std::optional<std::vector<std::uint32_t>> approximate(const std::vector<Generator>& gens, cplx target,
                                                      double accuracy)
{
    struct Partial {
        cplx sum;
        std::vector<std::uint32_t> parts;
        double miss;
    };
    const std::size_t width = 24;
    std::vector<Partial> beam{{0, {}, std::abs(target)}};
    for (int round = 0; round < 64; ++round) {
        std::vector<Partial> next;
        for (const auto& p : beam)
            for (std::uint32_t g = 0; g < gens.size(); ++g) {
                cplx s = p.sum + gens[g].log_value;
                double miss = std::abs(target - s);
                if (miss >= p.miss)
                    continue;
                auto parts = p.parts;
                parts.push_back(g);
                if (miss < accuracy)
                    return parts;
                next.push_back({s, std::move(parts), miss});
            }
        if (next.empty())
            return std::nullopt;
        std::sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) { return a.miss < b.miss; });
        beam.clear();
        for (auto& p : next) {
            bool dup = false;
            for (const auto& b : beam)
                dup = dup || std::abs(b.sum - p.sum) < accuracy / 64;
            if (!dup)
                beam.push_back(std::move(p));
            if (beam.size() == width)
                break;
        }
    }
    return std::nullopt;
}

SpExpr build_parallel(const std::vector<Generator>& gens, const std::vector<std::uint32_t>& parts)
{
    std::optional<SpExpr> out;
    for (std::uint32_t g : parts)
        out = out ? SpExpr::parallel(*out, gens[g].expr) : gens[g].expr;
    return *out;
}

// Grid over closed B(1, r) with spacing h; every cell must lie inside one of the discs
// (y_i c_g, |y_i| R_g), which are the exact images Phi_i(B(1, rho)).
struct CoverGrid {
    double r, h;
    cplx cg;
    double rg;

    double half_diag() const { return h / std::numbers::sqrt2; }
    bool covers(cplx y, cplx p) const
    {
        const double tol = 1e-9;
        return std::abs(y) * rg - std::abs(p - y * cg) > half_diag() * (1 + tol) + tol;
    }
    template <class F>
    bool for_each_point(F&& visit) const
    {
        long span = static_cast<long>(std::ceil((r + h) / h));
        for (long a = -span; a <= span; ++a)
            for (long b = -span; b <= span; ++b) {
                cplx p = 1.0 + cplx(a * h, b * h);
                if (std::abs(p - 1.0) <= r + half_diag() && !visit(p))
                    return false;
            }
        return true;
    }
    bool certify(const std::vector<cplx>& pool) const
    {
        return for_each_point([&](cplx p) {
            for (auto it = pool.rbegin(); it != pool.rend(); ++it)
                if (covers(*it, p))
                    return true;
            return false;
        });
    }
};

} // namespace

IfsSystem precompute_ifs(const GaussianRational& q, const GaussianRational& y, const IfsOptions& opts)
{
    IfsSystem sys;
    sys.q = q;
    sys.y = y;
    sys.seed = find_base_gadget(q, y, opts.depth_cap);

    // Series powers multiply f_q(y_G); take the first that is large enough and stays in H*.
    GaussianRational w0 = f_q(sys.seed.y, q).value();
    GaussianRational wk = 1;
    bool found = false;
    for (unsigned k = 1; k <= 256 && !found; ++k) {
        wk *= w0;
        if (wk.is_real() || log_abs(wk) < std::log(opts.min_base_modulus))
            continue;
        SpExpr e = series_power(sys.seed.expr, k);
        ExactState s = sp_state(e, q, y);
        if (!in_hstar(s, q))
            continue;
        sys.base = {e, s, y_eff(s, q).value()};
        found = true;
    }
    if (!found)
        throw NotFound("could not strengthen the base gadget");
    sys.w = f_q(sys.base.y, q).value();

    // alpha strictly between |g'(1)| = 1/|w| and 1, checked exactly.
    double gp1 = std::exp(-log_abs(sys.w));
    sys.alpha = dyadic_below((1 + gp1) / 2);
    if (!(abs_sq(sys.w) * sys.alpha * sys.alpha > 1 && sys.alpha < 1))
        throw CoverNotFound("alpha certification failed");

    const GaussianRational& yb = sys.base.y;
    double K = abs_d((yb - 1) * (yb + q - 1));
    double d1 = abs_d(1 - (2 - q - yb));   // distance from 1 to the pole of g
    const double margin = 1e-9;

    mpq_class r(1, 2);
    for (int attempt = 0; attempt <= opts.max_halvings; ++attempt, r /= 2) {
        double rd = r.get_d();
        if (!(sys.alpha < 1 - r && sys.alpha * (1 + r) < 1))
            continue;
        if (!(d1 > rd * (1 + margin)))
            continue;
        double gsup = K / ((d1 - rd) * (d1 - rd)) * (1 + margin);
        if (!(gsup < sys.alpha.get_d() * (1 - margin)))
            continue;
        double l_bound = (1 + rd) * gsup;
        if (!(l_bound < 1))
            continue;
        mpq_class rho = dyadic_below(0.95 * rd / (1 + l_bound));

        auto [cg, rg] = g_image_disc(q, yb, rho.get_d());
        CoverGrid grid{rd, rg * (1 - rd) / 8, cg, rg};
        std::vector<Generator> gens = generators(sys, 4 * rd, rg / 100);

        // Synthesise a cover gadget for each grid point not yet covered, aiming slightly
        // inside U so that the exact interaction stays in U.
        std::vector<cplx> pool;
        std::vector<std::vector<std::uint32_t>> recipes;
        bool ok = grid.for_each_point([&](cplx p) {
            for (auto it = pool.rbegin(); it != pool.rend(); ++it)
                if (grid.covers(*it, p))
                    return true;
            cplx aim = p / cg;
            double inner = rd - rg / 20;
            if (std::abs(aim - 1.0) > inner)
                aim = 1.0 + (aim - 1.0) * (inner / std::abs(aim - 1.0));
            auto parts = approximate(gens, std::log(aim), rg / 25);
            if (!parts)
                return false;
            cplx value = 1;
            for (auto g : *parts)
                value *= std::exp(gens[g].log_value);
            if (!grid.covers(value, p))
                return false;
            pool.push_back(value);
            recipes.push_back(std::move(*parts));
            return true;
        });
        if (!ok)
            continue;

        // Exact gadgets for the chosen values, then certification again with exact y_i.
        std::vector<CoverEntry> cover;
        std::unordered_set<std::string> seen;
        for (const auto& parts : recipes) {
            SpExpr e = build_parallel(gens, parts);
            ExactState s = sp_state(e, q, y);
            if (!in_hstar(s, q)) {
                ok = false;
                break;
            }
            GaussianRational yi = y_eff(s, q).value();
            if (!(abs_sq(yi - 1) < r * r)) {
                ok = false;
                break;
            }
            if (seen.insert(to_string(yi)).second)
                cover.push_back({e, s, yi});
        }
        if (!ok)
            continue;
        std::vector<cplx> exact_pool;
        for (const auto& c : cover)
            exact_pool.push_back(to_complex(c.y));
        if (!grid.certify(exact_pool))
            continue;

        double lip = 0;
        for (const auto& c : exact_pool)
            lip = std::max(lip, std::abs(c) * gsup);
        sys.r = r;
        sys.rho = rho;
        sys.lipschitz = lip * (1 + margin);
        sys.sector_b = 1 + rd / 2;
        sys.sector_a = 0.99 * rd / (2 * sys.sector_b);
        sys.cover = std::move(cover);

        // Step maps: series with the base, then parallel with cover gadget i.
        const ExactState& bs = sys.base.state;
        GaussianRational qq1 = q * (q - 1);
        GaussianRational s00 = bs.same / q, s01 = bs.dif / qq1;
        GaussianRational s10 = bs.dif / q, s11 = bs.same / q + (q - 2) * bs.dif / qq1;
        for (const auto& c : sys.cover) {
            GaussianRational p0 = c.state.same / q, p1 = c.state.dif / qq1;
            sys.steps.push_back(StepMatrix::from(p0 * s00, p0 * s01, p1 * s10, p1 * s11));
        }
        return sys;
    }
    throw CoverNotFound("no certified cover after " + std::to_string(opts.max_halvings) + " halvings of r");
}

WalkResult ifs_walk(const IfsSystem& sys, const GaussianRational& x0, const mpq_class& eps, std::size_t min_steps)
{
    if (sgn(eps) <= 0)
        throw PreconditionError("ifs_walk needs eps > 0");
    if (!(abs_sq(x0 - 1) < sys.r * sys.r))
        throw OutsideRegion("ifs_walk start point is not in U");

    const double L = sys.lipschitz, theta = std::sqrt(L);
    const double log2_eps = log_abs(eps) / std::numbers::ln2;
    double need = (std::log2(4 * sys.r.get_d()) - log2_eps) / -std::log2(L);
    std::size_t k = std::max<std::size_t>(min_steps, need <= 0 ? 0 : static_cast<std::size_t>(std::ceil(need)));

    const mpq_class rho2 = sys.rho * sys.rho;
    const double rho_d = sys.rho.get_d();
    const cplx yb = to_complex(sys.base.y), qc = to_complex(sys.q);
    std::vector<cplx> ys;
    for (const auto& c : sys.cover)
        ys.push_back(to_complex(c.y));
    std::vector<std::size_t> chosen;
    GaussianRational t = x0;
    for (std::size_t j = 0; j < k; ++j) {
        cplx tc = to_complex(t);
        std::optional<GaussianRational> next;
        for (std::size_t i = 0; i < sys.cover.size() && !next; ++i) {
            cplx approx = ((yb + qc - 2.0) * tc - ys[i] * (qc - 1.0)) / (ys[i] * yb - tc);
            if (std::abs(approx - 1.0) > rho_d * (1 + 1e-6))
                continue;
            GaussianRational cand = ifs_inverse(sys, i, t);
            if (abs_sq(cand - 1) < rho2) {
                next = std::move(cand);
                chosen.push_back(i);
            }
        }
        if (!next)
            throw CoverNotFound("backward orbit left the certified cover");
        // Rounding budget: the forward replay damps the error made at depth j+1 by L^(j+1).
        double bits = 0.5 + 2 - log2_eps - std::log2(1 - theta) + static_cast<double>(j + 2) * std::log2(theta);
        unsigned long b = static_cast<unsigned long>(std::max(24.0, std::ceil(bits) + 1));
        t = round_dyadic(*next, b);
    }

    WalkResult out;
    out.trace.assign(chosen.rbegin(), chosen.rend());
    if (out.trace.empty()) {
        out.x_hat = 1;
        return out;
    }

    Fraction qm1 = as_fraction(sys.q - 1);
    std::size_t start = 0;
    ProjectiveState v = ProjectiveState::from(sys.cover[out.trace[0]].state);
    SpExpr expr = sys.cover[out.trace[0]].expr;
    for (std::size_t j = 1; j < out.trace.size(); ++j) {
        std::size_t i = out.trace[j];
        if (is_unit_interaction(v, qm1)) {
            // A prefix with y = 1 contributes nothing; restart from here.
            start = j;
            v = ProjectiveState::from(sys.cover[i].state);
            expr = sys.cover[i].expr;
            continue;
        }
        v = sys.steps[i].apply(v);
        expr = SpExpr::parallel(SpExpr::series(expr, sys.base.expr), sys.cover[i].expr);
    }
    out.trace.erase(out.trace.begin(), out.trace.begin() + static_cast<std::ptrdiff_t>(start));
    if (is_unit_interaction(v, qm1)) {
        out.trace.clear();
        out.x_hat = 1;
        return out;
    }
    out.gadget = Gadget{expr, v};
    out.x_hat = y_eff(out.gadget->state(), sys.q).value();
    return out;
}

GaussianRational approx_root(const GaussianRational& z, unsigned long n, const mpq_class& tol)
{
    if (n == 0 || z.is_zero() || sgn(tol) <= 0)
        throw PreconditionError("approx_root needs n >= 1, z != 0, tol > 0");
    if (n == 1)
        return z;
    const double log_mod = log_abs(z) / static_cast<double>(n);
    const double log2_tol = log_abs(tol) / std::numbers::ln2;
    const long e = static_cast<long>(std::floor(log_mod / std::numbers::ln2));
    GaussianRational u = from_complex(std::polar(std::exp(log_mod - e * std::numbers::ln2), arg(z) / static_cast<double>(n)));
    u *= GaussianRational(pow2(e));
    const unsigned long bits = static_cast<unsigned long>(std::max(8.0, std::ceil(-log2_tol) + 12));
    const GaussianRational nn(static_cast<long>(n));
    for (int iter = 0; iter < 100; ++iter) {
        GaussianRational un1 = pow(u, n - 1);
        GaussianRational resid = un1 * u - z;
        if (resid.is_zero())
            return u;
        // Newton correction size; once it is far below tol the iterate is accurate enough.
        double step = log_abs(resid) - log_abs(un1) - std::log(static_cast<double>(n));
        if (step / std::numbers::ln2 < log2_tol - 4)
            return u;
        u = round_dyadic(u - resid / (nn * un1), bits);
    }
    throw BudgetFailure("approx_root did not converge");
}

namespace {

Gadget synthesize_in_u(const IfsSystem& sys, const GaussianRational& y0, mpq_class eps)
{
    for (int attempt = 0; attempt < 8; ++attempt, eps /= 2) {
        WalkResult w = ifs_walk(sys, y0, eps, 1);
        if (w.gadget && projective_close(w.gadget->raw, sys.q, y0, eps))
            return *w.gadget;
    }
    throw BudgetFailure("walk did not produce an H* gadget within tolerance");
}

} // namespace

Gadget synthesize(const IfsSystem& sys, const GaussianRational& y0, const mpq_class& eps)
{
    if (sgn(eps) <= 0)
        throw PreconditionError("synthesize needs eps > 0");
    const GaussianRational& q = sys.q;

    if (abs_sq(y0 - 1) < sys.r * sys.r)
        return synthesize_in_u(sys, y0, eps);

    // y0 = 0: aim for B(eps/2, eps/2), which lies inside B(0, eps).
    GaussianRational target = y0;
    mpq_class tol = eps;
    if (y0.is_zero()) {
        target = GaussianRational(mpq_class(eps / 2));
        tol = eps / 2;
        if (abs_sq(target - 1) < sys.r * sys.r)
            return synthesize_in_u(sys, target, tol);
    }
    const mpq_class radius = tol;

    // n-th root regime: the root lands in the sector {|arg| <= a, 1/b <= |u| <= b} inside U.
    const double log_mod = log_abs(target);
    const double a = sys.sector_a, b = sys.sector_b;
    unsigned long n = static_cast<unsigned long>(
        std::max(std::ceil(std::numbers::pi / a), std::ceil(std::abs(log_mod) / std::log(b))));
    n = std::max(n, 2UL);

    for (int attempt = 0; attempt < 8; ++attempt, tol /= 2) {
        const double log_u = log_mod / static_cast<double>(n);
        const double log_tol = log_abs(tol);
        // delta = min(|u0|/(n-1), |u0| eps / (e n |y0|)), kept as a dyadic lower bound.
        double log_delta = std::min(log_u - std::log(static_cast<double>(n - 1)),
                                    log_u + log_tol - 1 - std::log(static_cast<double>(n)) - log_mod);
        mpq_class delta = pow2(static_cast<long>(std::floor(log_delta / std::numbers::ln2)));
        mpq_class root_tol = std::min(mpq_class(delta / 4), mpq_class(sys.r / 400));
        GaussianRational u0 = approx_root(target, n, root_tol);
        if (!(abs_sq(u0 - 1) < sys.r * sys.r))
            throw BudgetFailure("n-th root fell outside U");
        Gadget inner = synthesize_in_u(sys, u0, delta / 2);
        ProjectiveState raw = parallel_power(inner.raw, n, q);
        if (projective_close(raw, q, target, radius))
            return {chromred::parallel_power(inner.expr, n), raw};
    }
    throw BudgetFailure("root regime did not reach the requested tolerance");
}

} // namespace chromred
