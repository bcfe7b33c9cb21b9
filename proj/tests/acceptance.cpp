// Acceptance run: one PASS/FAIL line per criterion, with timings and pinned tolerances.
// Optional argument: a comma-separated list of criteria to run, e.g. "1,2,5".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "chromred/box_shrink.hpp"
#include "chromred/exact_eval.hpp"
#include "chromred/gadget.hpp"
#include "chromred/interaction.hpp"
#include "chromred/reduction.hpp"
#include "chromred/region_scan.hpp"
#include "test_support.hpp"

using namespace chromred;
using chromred::testing::random_gaussian;
using chromred::testing::random_multigraph;
using chromred::testing::random_sp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool nondegenerate(const GaussianRational& q)
{
    return !q.is_zero() && q != GaussianRational(1);
}

// ---------------------------------------------------------------------------------------------
// 1. sp_state against brute force on flattened expressions.

Outcome oracle_equivalence()
{
    std::mt19937_64 rng(101);
    std::vector<std::pair<GaussianRational, GaussianRational>> params;
    while (params.size() < 10) {
        GaussianRational q = random_gaussian(rng, 3, 3), y = random_gaussian(rng, 3, 3);
        if (nondegenerate(q))
            params.emplace_back(q, y);
    }
    std::size_t compared = 0, mismatches = 0;
    for (int k = 0; k < 500; ++k) {
        SpExpr x = random_sp(rng, 1 + rng() % 12);
        TwoTerminalGraph flat = flatten(x);
        for (const auto& [q, y] : params) {
            ++compared;
            mismatches += sp_state(x, q, y) != state_bruteforce(flat, q, y);
        }
    }
    return {mismatches == 0, std::to_string(compared) + " comparisons, " + std::to_string(mismatches) +
                                 " mismatches (tolerance: exact)"};
}

// ---------------------------------------------------------------------------------------------
// 2. Product laws on random states and the involution f_q.

Outcome composition_laws()
{
    std::mt19937_64 rng(202);
    std::size_t pairs = 0, failures = 0, skipped = 0;
    const ExtendedValue one(1);
    while (pairs < 1000) {
        GaussianRational q = random_gaussian(rng);
        if (!nondegenerate(q))
            continue;
        ExactState a{random_gaussian(rng), random_gaussian(rng)}, b{random_gaussian(rng), random_gaussian(rng)};
        if ((a.same.is_zero() && a.dif.is_zero()) || (b.same.is_zero() && b.dif.is_zero())) {
            ++skipped;
            continue;
        }
        ExtendedValue ya = y_eff(a, q), yb = y_eff(b, q);
        ExactState par = compose_parallel(a, b, q), ser = compose_series(a, b, q);
        bool par_exceptional = (ya == ExtendedValue(0) && yb.is_infinite()) ||
                               (yb == ExtendedValue(0) && ya.is_infinite()) ||
                               (par.same.is_zero() && par.dif.is_zero());
        ExtendedValue special(1 - q);
        bool ser_exceptional = (ya == one && yb == special) || (yb == one && ya == special) ||
                               (ser.same.is_zero() && ser.dif.is_zero());
        if (par_exceptional || ser_exceptional) {
            ++skipped;
            continue;
        }
        ++pairs;
        // y of a parallel composition is the product of the y's; f_q(y) multiplies in series.
        ExtendedValue yp = y_eff(par, q), ys = y_eff(ser, q);
        bool ok = yp == parallel_law(ya, yb) && ys == series_law(ya, yb, q);
        if (!ya.is_infinite() && !yb.is_infinite())
            ok = ok && yp == ExtendedValue(ya.value() * yb.value());
        ExtendedValue fa = f_q(ya, q), fb = f_q(yb, q);
        if (!fa.is_infinite() && !fb.is_infinite())
            ok = ok && f_q(ys, q) == ExtendedValue(fa.value() * fb.value());
        failures += !ok;
    }

    std::size_t involution_failures = 0;
    for (int k = 0; k < 10000; ++k) {
        GaussianRational q = random_gaussian(rng, 9, 7);
        if (q.is_zero())
            q = 1;
        ExtendedValue z = k % 50 == 0 ? ExtendedValue::infinity()
                          : k % 50 == 1 ? ExtendedValue(1)
                                        : ExtendedValue(random_gaussian(rng, 9, 7));
        involution_failures += f_q(f_q(z, q), q) != z;
    }
    return {failures == 0 && involution_failures == 0,
            std::to_string(pairs) + " state pairs (" + std::to_string(skipped) + " exceptional skipped), " +
                std::to_string(failures) + " law failures; 10000 involution samples, " +
                std::to_string(involution_failures) + " failures (tolerance: exact)"};
}

// ---------------------------------------------------------------------------------------------
// 3. Deletion-contraction on every edge, and the apex identity.

Outcome deletion_contraction_and_apex()
{
    std::mt19937_64 rng(303);
    std::size_t edges_checked = 0, delcon_failures = 0, apex_failures = 0, cross_failures = 0;
    for (int k = 0; k < 200; ++k) {
        MultiGraph g = random_multigraph(rng, 6, 10);
        GaussianRational q = random_gaussian(rng), y = random_gaussian(rng);
        GaussianRational z = z_bruteforce(g, q, y);
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            ++edges_checked;
            GaussianRational split = z_bruteforce(delete_edge(g, e), q, y) + (y - 1) * z_bruteforce(contract_edge(g, e), q, y);
            delcon_failures += split != z;
        }
        cross_failures += z_vertex_subsets(g, q, y) != z;
        // The apex graph has up to 31 edges, so it is evaluated over vertex subsets.
        ChromaticShift s = chromatic_shift(g, q);
        apex_failures += z_vertex_subsets(s.graph, q, 0) != s.factor * z_bruteforce(g, q - 3, 0);
    }
    return {delcon_failures == 0 && apex_failures == 0 && cross_failures == 0,
            "200 graphs, " + std::to_string(edges_checked) + " edge splits, " + std::to_string(delcon_failures) +
                " deletion-contraction failures, " + std::to_string(apex_failures) + " apex failures, " +
                std::to_string(cross_failures) + " evaluator disagreements (tolerance: exact)"};
}

// ---------------------------------------------------------------------------------------------
// 4. Gadget synthesis accuracy and size.

Outcome gadget_synthesis()
{
    GaussianRational q = parse_gaussian("2+i"), zero = 0;
    IfsSystem sys = precompute_ifs(q, zero);
    const char* targets[] = {"0", "1", "2+2*i", "2-2*i", "-2+2*i", "-2-2*i", "1000000"};
    std::size_t failures = 0, count = 0;
    std::uint64_t largest = 0;
    std::string fits;
    for (const char* t : targets) {
        GaussianRational y0 = parse_gaussian(t);
        std::vector<std::pair<double, double>> points;   // (log2(1/eps), edges)
        for (int b = 5; b <= 20; ++b) {
            mpq_class eps = pow2(-b);
            Gadget h = synthesize(sys, y0, eps);
            ExactState st = h.state();
            ExtendedValue yh = y_eff(st, q);
            bool ok = in_hstar(st, q) && !yh.is_infinite() && abs_sq(yh.value() - y0) < eps * eps;
            failures += !ok;
            ++count;
            points.emplace_back(b, static_cast<double>(h.edge_count()));
            largest = std::max(largest, h.edge_count());
        }
        // Least-squares slope c1, then the least c2 making c1 x + c2 an upper bound.
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(points.size());
        for (auto [x, y] : points) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double c1 = (n * sxy - sx * sy) / (n * sxx - sx * sx), c2 = -1e300;
        for (auto [x, y] : points)
            c2 = std::max(c2, y - c1 * x);
        fits += std::string(fits.empty() ? "" : "; ") + "y0=" + t + ": " + fmt("%.0f", c1) + " log2(1/eps) + " +
                fmt("%.0f", c2);
    }
    return {failures == 0,
            std::to_string(count) + " syntheses at eps = 2^-5..2^-20, " + std::to_string(failures) +
                " failures (in H*, |y_H - y0| < eps exactly); largest " + std::to_string(largest) +
                " edges; fitted edge bounds " + fits};
}

// ---------------------------------------------------------------------------------------------
// 5. Box shrinking: radius law, containment, zero test.

GaussianRational small_nonzero(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> k(-8, 8);
    while (true) {
        mpq_class re(k(rng), 4), im(k(rng), 4);
        re.canonicalize();
        im.canonicalize();
        GaussianRational z(re, im);
        if (!z.is_zero())
            return z;
    }
}

Outcome box_shrinking()
{
    std::mt19937_64 rng(505);
    // |A|, |B| <= 2 sqrt 2 < 3 and nonzero values have modulus >= 1/4 > 1/3.
    const mpq_class C = 3, delta(1, 1 << 24);
    std::size_t runs = 0, violations = 0, zero_failures = 0, steps_total = 0;
    for (int k = 0; k < 300; ++k) {
        GaussianRational a = small_nonzero(rng);
        GaussianRational b = k % 6 == 0 ? GaussianRational(0) : small_nonzero(rng);
        GaussianRational root = -b / a;
        for (auto mode : {OracleMode::Abs, OracleMode::Arg})
            for (auto p : {Perturbation::Exact, Perturbation::SeededRandom, Perturbation::Adversarial}) {
                LinearOracle f(a, b, mode, p, rng());
                mpq_class radius = C * C;
                auto out = localize(f, C, delta, [&](std::size_t step, const ShrinkBox& box) {
                    bool inside = step == 0 ? box.contains_closed(root) : box.contains(root);
                    violations += !inside || box.D != radius;
                    radius = radius * 7 / 8;
                    steps_total = std::max(steps_total, step);
                });
                ++runs;
                if (!std::holds_alternative<Localized>(out)) {
                    ++violations;
                    continue;
                }
                const auto& loc = std::get<Localized>(out);
                violations += !(loc.box.contains(root) && loc.box.D <= delta / 2);
            }
    }
    std::size_t zero_runs = 0;
    for (int k = 0; k < 200; ++k) {
        bool a_zero = k < 100;
        GaussianRational a = a_zero ? GaussianRational(0) : small_nonzero(rng);
        GaussianRational b = small_nonzero(rng);
        for (auto mode : {OracleMode::Abs, OracleMode::Arg})
            for (auto p : {Perturbation::Exact, Perturbation::SeededRandom, Perturbation::Adversarial}) {
                LinearOracle f(a, b, mode, p, rng());
                ++zero_runs;
                zero_failures += (zero_test(f, C) == ZeroTest::IsZero) != a_zero;
            }
    }
    return {violations == 0 && zero_failures == 0,
            std::to_string(runs) + " localisations (" + std::to_string(steps_total) + " steps each, D_k = (7/8)^k C^2 " +
                "checked exactly), " + std::to_string(violations) + " violations; " + std::to_string(zero_runs) +
                " zero tests on 100 + 100 instances, " + std::to_string(zero_failures) + " wrong"};
}

// ---------------------------------------------------------------------------------------------
// 6. End-to-end telescoping.

bool chords_cross(std::pair<int, int> a, std::pair<int, int> b)
{
    auto [p, q] = a;
    auto [r, s] = b;
    return (p < r && r < q && q < s) || (r < p && p < s && s < q);
}

// Planar by construction: an outerplanar graph on a cycle (non-crossing chords) plus an apex
// joined to cycle vertices, then parallel copies and loops. Kind 1 puts a parallel pair first
// so that the first contraction makes a loop (Z(G/e) = 0 at y = 0); kind 2 adds a loop
// (Z(G) = 0 at y = 0).
MultiGraph random_planar(std::mt19937_64& rng, int kind)
{
    std::size_t n = 1 + rng() % 8;
    bool apex = n >= 4 && rng() % 2;
    int ring = static_cast<int>(apex ? n - 1 : n);
    std::vector<Edge> edges;
    auto add = [&](int u, int v) { edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)}); };
    if (ring >= 2)
        for (int v = 0; v < ring; ++v)
            if ((ring > 2 || v == 0) && rng() % 5 != 0)
                add(v, (v + 1) % ring);
    std::vector<std::pair<int, int>> chords;
    for (int t = 0; t < 6 && ring >= 4; ++t) {
        int a = static_cast<int>(rng() % ring), b = static_cast<int>(rng() % ring);
        if (a > b)
            std::swap(a, b);
        if (b - a < 2 || (a == 0 && b == ring - 1))
            continue;
        bool ok = std::none_of(chords.begin(), chords.end(), [&](auto c) { return chords_cross(c, {a, b}) || c == std::pair{a, b}; });
        if (ok) {
            chords.push_back({a, b});
            add(a, b);
        }
    }
    if (apex)
        for (int v = 0; v < ring; ++v)
            if (rng() % 3 != 0)
                add(ring, v);
    std::shuffle(edges.begin(), edges.end(), rng);
    if (!edges.empty() && rng() % 4 == 0)
        edges.push_back(edges[rng() % edges.size()]);
    if (rng() % 8 == 0)
        add(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
    if (kind == 1) {
        if (n == 1)
            n = 2;
        Edge first = edges.empty() ? Edge{0, 1} : edges.front();
        if (first.is_loop())
            first = {0, 1};
        edges.insert(edges.begin(), {first, first});
    } else if (kind == 2) {
        auto v = static_cast<VertexId>(rng() % n);
        edges.insert(edges.begin() + static_cast<std::ptrdiff_t>(rng() % (edges.size() + 1)), Edge{v, v});
    }
    if (edges.size() > 14)
        edges.resize(14);
    return MultiGraph(n, edges);
}

Outcome end_to_end()
{
    std::mt19937_64 rng(606);
    std::vector<MultiGraph> graphs;
    for (int k = 0; k < 100; ++k)
        graphs.push_back(random_planar(rng, k % 5 == 1 ? 1 : k % 10 == 3 ? 2 : 0));
    std::size_t max_edges = 0, max_vertices = 0;
    for (const auto& g : graphs) {
        max_edges = std::max(max_edges, g.edge_count());
        max_vertices = std::max(max_vertices, g.vertex_count());
    }

    const GaussianRational zero = 0;
    std::size_t runs = 0, mismatches = 0, zero_contractions = 0, unconstrained = 0, zero_values = 0;
    for (const char* qs : {"2+i", "7/4+1/2*i"}) {
        GaussianRational q = parse_gaussian(qs);
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            const MultiGraph& g = graphs[k];
            GaussianRational exact = z_bruteforce(g, q, zero);
            zero_values += exact.is_zero();
            for (auto mode : {OracleMode::Abs, OracleMode::Arg}) {
                Perturbation p = k % 2 ? Perturbation::Adversarial : Perturbation::SeededRandom;
                std::uint64_t seed = rng();
                OracleFactory factory = [&](const MultiGraph& h, std::size_t e) {
                    return direct_edge_oracle(h, e, q, zero, mode, p, mix_seed(seed, h.edge_count()));
                };
                GaussianRational z = telescope(g, factory, q, zero, [&](const TelescopeStep& s) {
                    zero_contractions += !s.report.b;
                    unconstrained += s.report.unconstrained;
                });
                ++runs;
                mismatches += z != exact;
            }
        }
    }

    // The same pipeline with every query answered through a synthesised gadget.
    std::size_t gadget_runs = 0, gadget_mismatches = 0;
    struct GadgetCase {
        const char* q;
        MultiGraph g;
        OracleMode mode;
    };
    std::vector<GadgetCase> cases = {{"2+i", MultiGraph(2, {{0, 1}}), OracleMode::Abs},
                                     {"2+i", MultiGraph(2, {{0, 1}}), OracleMode::Arg},
                                     {"2+i", MultiGraph(2, {{0, 1}, {0, 1}}), OracleMode::Abs},
                                     {"7/4+1/2*i", MultiGraph(2, {{0, 1}}), OracleMode::Arg}};
    std::string current_q;
    std::optional<IfsSystem> sys;
    for (const auto& c : cases) {
        GaussianRational q = parse_gaussian(c.q);
        if (current_q != c.q) {
            sys = precompute_ifs(q, zero);
            current_q = c.q;
        }
        SimulatedZOracle sim(q, zero, c.mode, Perturbation::SeededRandom, 61 + gadget_runs);
        OracleFactory factory = [&](const MultiGraph& h, std::size_t e) { return edge_oracle(h, e, sim, *sys); };
        ++gadget_runs;
        gadget_mismatches += telescope(c.g, factory, q, zero) != z_bruteforce(c.g, q, zero);
    }

    return {mismatches == 0 && gadget_mismatches == 0,
            std::to_string(runs) + " telescopes (100 planar graphs, <= " + std::to_string(max_vertices) + " vertices, <= " +
                std::to_string(max_edges) + " edges, q in {2+i, 7/4+i/2}, abs and arg), " + std::to_string(mismatches) +
                " mismatches; " + std::to_string(zero_contractions) + " steps with Z(G/e) = 0 (" +
                std::to_string(unconstrained) + " with Z(G) = 0 too), " + std::to_string(zero_values) +
                " instances with Z = 0; gadget-backed route " + std::to_string(gadget_runs) + " runs, " +
                std::to_string(gadget_mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------------------------
// 7. Region scan.

Outcome region_scan()
{
    ScanConfig cfg;   // the rectangle from -i to 2+i, 101 x 101, depth 8, margin 1e-9
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    auto t0 = std::chrono::steady_clock::now();
    ScanResult first = scan(cfg);
    double elapsed = seconds_since(t0);
    std::string pgm = to_pgm(first);
    nlohmann::json summary = scan_summary(first);
    std::ofstream("acceptance_scan.pgm", std::ios::binary) << pgm;
    std::ofstream("acceptance_scan.json") << summary.dump(2) << '\n';

    cfg.threads = 1;
    bool identical = to_pgm(scan(cfg)) == pgm;
    std::size_t violations = summary["counts"]["analytic_not_hard"].get<std::size_t>();
    return {elapsed < 600 && violations == 0 && identical,
            "sweep " + fmt("%.1f", elapsed) + " s (limit 600 s), " + summary["counts"]["hard"].dump() + " Hard of " +
                summary["counts"]["pixels"].dump() + ", " + summary["counts"]["analytic"].dump() +
                " analytic pixels, " + std::to_string(violations) + " superset violations, rerun " +
                (identical ? "byte-identical" : "DIFFERENT") + "; depth histogram " +
                summary["depth_histogram"].dump()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    if (argc > 1) {
        std::stringstream in(argv[1]);
        std::string tok;
        while (std::getline(in, tok, ','))
            only.insert(std::stoi(tok));
    }
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence", 120, oracle_equivalence},
        {2, "composition laws", 60, composition_laws},
        {3, "deletion-contraction and apex identities", 120, deletion_contraction_and_apex},
        {4, "gadget synthesis", 600, gadget_synthesis},
        {5, "box shrinking", 300, box_shrinking},
        {6, "end-to-end reduction", 1800, end_to_end},
        {7, "region scan", 1200, region_scan},   // two sweeps; the first alone must finish in 600 s
    };
    int failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id))
            continue;
        ++ran;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        double s = seconds_since(t0);
        bool pass = out.pass && s < c.budget_s;
        failed += !pass;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (pass ? "PASS" : "FAIL") << " ["
                  << fmt("%.1f", s) << " s, budget " << fmt("%.0f", c.budget_s) << " s] " << out.detail << std::endl;
    }
    std::cout << "acceptance: " << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
