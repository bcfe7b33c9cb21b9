#include "chromred/region_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_set>

#include "chromred/error.hpp"

namespace chromred {

namespace {

using cplx = std::complex<double>;

constexpr double kUnit = std::numeric_limits<double>::epsilon();

// A state scaled so that max(|same|, |dif|) = 1, with an absolute error bound on both components
// relative to the exact state under the same scaling.
struct Tracked {
    cplx same, dif;
    double err = 0;
};

struct Coefficients {
    cplx q, inv_q, inv_qq1, q_minus_1, q_minus_2;
    double series_same, series_dif, parallel_same, parallel_dif;
    double rounding;
};

Coefficients coefficients(cplx q)
{
    Coefficients c;
    c.q = q;
    c.inv_q = 1.0 / q;
    c.inv_qq1 = 1.0 / (q * (q - 1.0));
    c.q_minus_1 = q - 1.0;
    c.q_minus_2 = q - 2.0;
    c.series_same = std::abs(c.inv_q) + std::abs(c.inv_qq1);
    c.series_dif = 2 * std::abs(c.inv_q) + std::abs(c.q_minus_2) * std::abs(c.inv_qq1);
    c.parallel_same = std::abs(c.inv_q);
    c.parallel_dif = std::abs(c.inv_qq1);
    // q itself is a rounded pixel coordinate; charge that and the arithmetic at a generous rate.
    c.rounding = 64 * kUnit;
    return c;
}

bool normalize(Tracked& t, double err_same, double err_dif)
{
    double m = std::max(std::abs(t.same), std::abs(t.dif));
    if (!std::isfinite(m) || m == 0)
        return false;
    t.same /= m;
    t.dif /= m;
    t.err = std::max(err_same, err_dif) / m + 2 * kUnit;
    return std::isfinite(t.err);
}

bool series(const Tracked& a, const Tracked& b, const Coefficients& c, Tracked& out)
{
    cplx dd = a.dif * b.dif * c.inv_qq1;
    out.same = a.same * b.same * c.inv_q + dd;
    out.dif = (a.same * b.dif + a.dif * b.same) * c.inv_q + c.q_minus_2 * dd;
    double e = a.err + b.err + a.err * b.err;
    return normalize(out, c.series_same * (e + c.rounding), c.series_dif * (e + c.rounding));
}

bool parallel(const Tracked& a, const Tracked& b, const Coefficients& c, Tracked& out)
{
    out.same = a.same * b.same * c.inv_q;
    out.dif = a.dif * b.dif * c.inv_qq1;
    double e = a.err + b.err + a.err * b.err;
    return normalize(out, c.parallel_same * (e + c.rounding), c.parallel_dif * (e + c.rounding));
}

// Certified lower bound for |n / d| given error bounds on n and d; 0 if d may vanish.
double quotient_lower(cplx n, double en, cplx d, double ed)
{
    double an = std::abs(n), ad = std::abs(d);
    if (ad <= ed)
        return 0;
    return std::max(0.0, an - en) / (ad + ed);
}

// In H* and |y_eff| or |f_q(y_eff)| certified above 1 + margin.
bool witnesses(const Tracked& t, const Coefficients& c, double margin)
{
    double e = t.err * (1 + 4 * kUnit) + 4 * kUnit;
    double aq1 = std::abs(c.q_minus_1);
    // Z^dif != 0 and y_eff != 1, i.e. (q - 1) Z^same != Z^dif.
    if (std::abs(t.dif) <= e)
        return false;
    cplx shifted = c.q_minus_1 * t.same - t.dif;
    double e_shifted = (aq1 + 1) * e;
    if (std::abs(shifted) <= e_shifted)
        return false;
    // y_eff = (q - 1) S / D and f_q(y_eff) = (q - 1) (S + D) / ((q - 1) S - D).
    if (quotient_lower(c.q_minus_1 * t.same, aq1 * e, t.dif, e) > 1 + margin)
        return true;
    return quotient_lower(c.q_minus_1 * (t.same + t.dif), 2 * aq1 * e, shifted, e_shifted) > 1 + margin;
}

// y_eff rounded to 40 significant bits (about 12 digits); infinity gets its own key.
struct Key {
    int exponent;
    long long re, im;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const
    {
        std::size_t h = std::hash<long long>()(k.re);
        h ^= std::hash<long long>()(k.im) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h ^ (static_cast<std::size_t>(k.exponent) * 0x100000001b3ULL);
    }
};

Key dedup_key(const Tracked& t, const Coefficients& c)
{
    if (std::abs(t.dif) <= t.err)
        return {std::numeric_limits<int>::max(), 0, 0};
    cplx y = c.q_minus_1 * t.same / t.dif;
    double m = std::max(std::abs(y.real()), std::abs(y.imag()));
    if (m == 0)
        return {std::numeric_limits<int>::min(), 0, 0};
    int e = std::ilogb(m);
    double scale = std::ldexp(1.0, 39 - e);
    return {e, std::llround(y.real() * scale), std::llround(y.imag() * scale)};
}

// How close a state comes to a witness: max(|y_eff|, |f_q(y_eff)|).
double score(const Tracked& t, const Coefficients& c)
{
    cplx shifted = c.q_minus_1 * t.same - t.dif;
    double a = std::abs(c.q_minus_1 * t.same) / std::abs(t.dif);
    double b = std::abs(c.q_minus_1 * (t.same + t.dif)) / std::abs(shifted);
    double s = std::max(std::isfinite(a) ? a : 0.0, std::isfinite(b) ? b : 0.0);
    return std::isnan(s) ? 0.0 : s;
}

void rank(std::vector<std::size_t>& idx, const std::vector<Tracked>& all, const Coefficients& c)
{
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(idx.size());
    for (std::size_t k : idx)
        keyed.emplace_back(-score(all[k], c), k);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < idx.size(); ++k)
        idx[k] = keyed[k].second;
}

std::size_t beam_width(std::size_t pair_cap)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(pair_cap))));
}

bool near(cplx q, double v, double margin)
{
    return std::abs(q - v) <= margin;
}

bool search_precondition(cplx q, double margin)
{
    return std::abs(q.imag()) > margin && !near(q, 0, margin) && !near(q, 1, margin) && !near(q, 2, margin);
}

} // namespace

bool analytic_region(std::complex<double> q, double margin)
{
    if (!search_precondition(q, margin))
        return false;
    return std::abs(1.0 - q) > 1 + margin || q.real() > 1.5 + margin;
}

SearchResult search_condition(std::complex<double> q, std::complex<double> y, int depth, double margin,
                              std::size_t state_cap, std::size_t pair_cap)
{
    SearchResult res;
    if (!search_precondition(q, margin))
        return res;
    Coefficients c = coefficients(q);

    Tracked edge;
    edge.same = q * y;
    edge.dif = q * (q - 1.0);
    if (!normalize(edge, std::abs(edge.same) * 4 * kUnit, std::abs(edge.dif) * 4 * kUnit))
        return res;

    std::vector<Tracked> all{edge};
    std::unordered_set<Key, KeyHash> seen{dedup_key(edge, c)};
    res.states = 1;
    if (witnesses(edge, c, margin)) {
        res.cls = PixelClass::Hard;
        res.depth_found = 0;
        return res;
    }

    // Each level composes the most promising recent states with the most promising states found
    // so far. The order only depends on earlier levels, so deeper searches extend shallower ones.
    std::vector<std::size_t> frontier{0};
    for (int level = 1; level <= depth && !frontier.empty() && all.size() < state_cap; ++level) {
        std::vector<std::size_t> partners(all.size());
        for (std::size_t k = 0; k < all.size(); ++k)
            partners[k] = k;
        rank(partners, all, c);
        rank(frontier, all, c);
        const std::size_t width = beam_width(pair_cap);
        if (frontier.size() > width)
            frontier.resize(width);
        if (partners.size() > width)
            partners.resize(width);

        std::vector<std::size_t> next;
        for (std::size_t i : frontier) {
            for (std::size_t j : partners) {
                if (all.size() >= state_cap)
                    break;
                for (int op = 0; op < 2; ++op) {
                    Tracked t;
                    bool ok = op == 0 ? series(all[i], all[j], c, t) : parallel(all[i], all[j], c, t);
                    if (!ok || !seen.insert(dedup_key(t, c)).second)
                        continue;
                    if (witnesses(t, c, margin)) {
                        res.cls = PixelClass::Hard;
                        res.depth_found = level;
                        res.states = all.size() + 1;
                        return res;
                    }
                    next.push_back(all.size());
                    all.push_back(t);
                }
            }
        }
        frontier = std::move(next);
    }
    res.states = all.size();
    return res;
}

GaussianRational pixel_q(const ScanConfig& cfg, std::size_t col, std::size_t row)
{
    auto lerp = [](const mpq_class& lo, const mpq_class& hi, std::size_t k, std::size_t n) {
        if (n == 1)
            return mpq_class((lo + hi) / 2);
        mpq_class t(static_cast<unsigned long>(k), static_cast<unsigned long>(n - 1));
        t.canonicalize();
        return mpq_class(lo + (hi - lo) * t);
    };
    mpq_class re = lerp(cfg.lower_left.re(), cfg.upper_right.re(), col, cfg.width);
    mpq_class im = lerp(cfg.upper_right.im(), cfg.lower_left.im(), row, cfg.height);
    return {re, im};
}

ScanResult scan(const ScanConfig& cfg)
{
    if (cfg.width == 0 || cfg.height == 0)
        throw PreconditionError("scan resolution must be at least 1x1");
    if (!(cfg.margin > 0))
        throw PreconditionError("scan margin must be positive");
    if (cfg.lower_left.re() > cfg.upper_right.re() || cfg.lower_left.im() > cfg.upper_right.im())
        throw PreconditionError("scan rectangle corners are out of order");

    const std::size_t n = cfg.width * cfg.height;
    ScanResult out;
    out.config = cfg;
    out.cls.assign(n, PixelClass::Unknown);
    out.depth_found.assign(n, -1);
    out.analytic.assign(n, false);
    const cplx y = to_complex(cfg.y);

    // vector<bool> packs bits, so workers write flags to a byte buffer.
    std::vector<std::uint8_t> analytic(n, 0);
    auto work = [&](std::size_t start, std::size_t stride) {
        for (std::size_t k = start; k < n; k += stride) {
            cplx q = to_complex(pixel_q(cfg, k % cfg.width, k / cfg.width));
            SearchResult s = search_condition(q, y, cfg.depth, cfg.margin, cfg.state_cap, cfg.pair_cap);
            out.cls[k] = s.cls;
            out.depth_found[k] = s.depth_found;
            analytic[k] = analytic_region(q, cfg.analytic_margin);
        }
    };
    unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(work, t, threads);
    for (auto& t : pool)
        t.join();
    for (std::size_t k = 0; k < n; ++k)
        out.analytic[k] = analytic[k] != 0;
    return out;
}

std::string to_pgm(const ScanResult& r)
{
    std::string out = "P5\n" + std::to_string(r.config.width) + " " + std::to_string(r.config.height) + "\n255\n";
    for (std::size_t k = 0; k < r.cls.size(); ++k) {
        if (r.cls[k] == PixelClass::Hard)
            out.push_back(static_cast<char>(255));
        else
            out.push_back(static_cast<char>(r.analytic[k] ? 128 : 0));
    }
    return out;
}

nlohmann::json scan_summary(const ScanResult& r)
{
    const ScanConfig& c = r.config;
    std::size_t hard = 0, analytic = 0, mismatch = 0;
    std::vector<std::size_t> histogram(static_cast<std::size_t>(std::max(c.depth, 0)) + 1, 0);
    for (std::size_t k = 0; k < r.cls.size(); ++k) {
        bool h = r.cls[k] == PixelClass::Hard;
        hard += h;
        analytic += r.analytic[k];
        mismatch += r.analytic[k] && !h;
        if (h)
            ++histogram[static_cast<std::size_t>(r.depth_found[k])];
    }
    nlohmann::json j;
    j["rect"] = {to_string(c.lower_left), to_string(c.upper_right)};
    j["resolution"] = {c.width, c.height};
    j["y"] = to_string(c.y);
    j["search"] = {{"method", "levelled series/parallel search from a single edge, ranked by max(|y|, |f_q(y)|)"},
                   {"depth", c.depth},
                   {"margin", c.margin},
                   {"analytic_margin", c.analytic_margin},
                   {"state_cap", c.state_cap},
                   {"pair_cap", c.pair_cap}};
    j["counts"] = {{"pixels", r.cls.size()},
                   {"hard", hard},
                   {"unknown", r.cls.size() - hard},
                   {"analytic", analytic},
                   {"analytic_not_hard", mismatch}};
    j["depth_histogram"] = histogram;
    return j;
}

} // namespace chromred
