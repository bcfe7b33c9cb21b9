#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chromred/interaction.hpp"
#include "chromred/number_field.hpp"
#include "chromred/sp_expr.hpp"

namespace chromred {

/// Gaussian integer, used for states kept over a shared integer denominator.
struct GaussInt {
    mpz_class re, im;
};

/// (same, dif) = (S, D) / den with den > 0. Cheap to push through linear maps because nothing
/// is reduced until to_state() is called.
struct ProjectiveState {
    GaussInt same, dif;
    mpz_class den = 1;

    static ProjectiveState from(const ExactState& s);
    ExactState to_state() const;
};

/// 2x2 map on projective states: (S, D) -> (a S + b D, c S + d D) / den.
struct StepMatrix {
    GaussInt a, b, c, d;
    mpz_class den = 1;

    static StepMatrix from(const GaussianRational& a, const GaussianRational& b, const GaussianRational& c,
                           const GaussianRational& d);
    ProjectiveState apply(const ProjectiveState& v) const;
};

/// A series-parallel gadget together with its interaction state.
struct Gadget {
    SpExpr expr;
    ProjectiveState raw;

    ExactState state() const { return raw.to_state(); }
    ExtendedValue y_eff(const GaussianRational& q) const { return chromred::y_eff(state(), q); }
    std::uint64_t edge_count() const { return expr.leaf_count(); }
};

struct BaseGadget {
    SpExpr expr = SpExpr::edge();
    ExactState state;
    GaussianRational y;   // effective interaction, finite
};

/// Smallest-depth gadget in H* whose f_q(y_G) is non-real with modulus > 1, from a bounded
/// search over series and parallel compositions deduplicated on exact y_eff.
BaseGadget find_base_gadget(const GaussianRational& q, const GaussianRational& y, int depth_cap = 6,
                            std::size_t level_cap = 400);

struct CoverEntry {
    SpExpr expr;
    ExactState state;
    GaussianRational y;
};

struct IfsOptions {
    int depth_cap = 6;
    double min_base_modulus = 4;   // strengthen the base until |f_q(y_G)| reaches this
    int max_halvings = 8;
};

/// Everything the synthesiser precomputes for one parameter pair (q, y).
struct IfsSystem {
    GaussianRational q, y;

    BaseGadget seed;            // as returned by find_base_gadget
    BaseGadget base;            // series power of the seed actually used by g
    GaussianRational w;         // f_q(y_base)

    mpq_class r;                // U = B(1, r)
    mpq_class alpha;            // |g'(1)| < alpha < 1
    mpq_class rho;              // walk radius: backward orbit stays in B(1, rho)
    double lipschitz = 0;       // bound for every Phi_i on closed U
    double sector_a = 0;        // {|arg z| <= a, 1/b <= |z| <= b} lies inside U
    double sector_b = 0;

    std::vector<CoverEntry> cover;
    std::vector<StepMatrix> steps;   // v -> (v in series with base) in parallel with cover[i]
};

IfsSystem precompute_ifs(const GaussianRational& q, const GaussianRational& y, const IfsOptions& opts = {});

/// Phi_i(z) = y_i g(z) and its inverse.
GaussianRational ifs_map(const IfsSystem& sys, std::size_t i, const GaussianRational& z);
GaussianRational ifs_inverse(const IfsSystem& sys, std::size_t i, const GaussianRational& t);

struct WalkResult {
    GaussianRational x_hat;            // Phi_{i_k}(...Phi_{i_1}(1)...)
    std::vector<std::size_t> trace;    // i_1, ..., i_k in forward order, trimmed
    std::optional<Gadget> gadget;      // none for an empty trace
};

/// Backward orbit of x0 through the inverse maps, replayed forward from 1.
WalkResult ifs_walk(const IfsSystem& sys, const GaussianRational& x0, const mpq_class& eps,
                    std::size_t min_steps = 0);

/// H in H* with |y_H - y0| < eps.
Gadget synthesize(const IfsSystem& sys, const GaussianRational& y0, const mpq_class& eps);

/// Principal n-th root of z, to within tol in modulus.
GaussianRational approx_root(const GaussianRational& z, unsigned long n, const mpq_class& tol);

} // namespace chromred
