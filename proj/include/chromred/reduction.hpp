#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>

#include "chromred/box_shrink.hpp"
#include "chromred/exact_eval.hpp"
#include "chromred/gadget.hpp"
#include "chromred/graph.hpp"

namespace chromred {

/// b = 1: r = Z(G) / Z(G/e). b = 0: Z(G/e) = 0 and r = 1.
struct RatioReport {
    GaussianRational r;
    bool b = false;
    std::size_t steps = 0;   // box shrinking steps
    bool unconstrained = false;   // nothing reconstructed: only possible when Z(G) = Z(G/e) = 0
};

/// Stands in for an approximate counter on the spliced graph G' = G with e replaced by H.
/// Z(G') follows from Z(G/e), Z(G) and the state of H, so G' is never built.
class SimulatedZOracle {
public:
    SimulatedZOracle(GaussianRational q, GaussianRational y, OracleMode mode, Perturbation perturbation,
                     std::uint64_t seed = 0, BruteForceOptions brute = {});

    const GaussianRational& q() const { return q_; }
    const GaussianRational& y() const { return y_; }
    OracleMode mode() const { return mode_; }
    const BruteForceOptions& brute_force() const { return brute_; }

    /// Z(G') = Z^same(H) Z(G/e) / q + Z^dif(H) (Z(G) - y Z(G/e)) / (q (q - 1)).
    GaussianRational spliced_value(const GaussianRational& z_contract, const GaussianRational& z_full,
                                   const ExactState& h) const;

    /// A 0.25 approximation of log|Z(G')| (abs) or arg Z(G') (arg).
    double reading(const GaussianRational& z_contract, const GaussianRational& z_full, const Gadget& h);

private:
    GaussianRational q_, y_;
    OracleMode mode_;
    Perturbation perturbation_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    BruteForceOptions brute_;
};

/// q (q - 1) / Z^dif(H): the factor that turns a reading of Z(G') into one of A y_hat + B.
GaussianRational gadget_rescale(const ExactState& h, const GaussianRational& q);

/// Oracle for f(y_hat) = Z(G/e) y_hat + Z(G), answered by synthesising H with y_H near
/// y0 + y and asking the simulated counter about the spliced graph.
std::unique_ptr<ApproxOracle> edge_oracle(const MultiGraph& g, std::size_t e, SimulatedZOracle& sim,
                                          const IfsSystem& sys);

/// Oracle for the same f backed directly by the exact A and B.
std::unique_ptr<ApproxOracle> direct_edge_oracle(const MultiGraph& g, std::size_t e, const GaussianRational& q,
                                                 const GaussianRational& y, OracleMode mode,
                                                 Perturbation perturbation, std::uint64_t seed,
                                                 const BruteForceOptions& brute = {});

struct RatioOptions {
    /// Refuse budgets whose denominator bound exceeds this many bits.
    unsigned long max_denominator_bits = 1u << 20;
};

RatioReport ratio_with_flag(const MultiGraph& g, std::size_t e, ApproxOracle& oracle, const GaussianRational& q,
                            const GaussianRational& y, const RatioOptions& opts = {});

using OracleFactory = std::function<std::unique_ptr<ApproxOracle>(const MultiGraph& g, std::size_t e)>;

struct TelescopeStep {
    std::size_t index = 0;   // step number i
    std::size_t edge = 0;    // index of e_i in the input graph
    RatioReport report;
};

using TelescopeObserver = std::function<void(const TelescopeStep&)>;

/// Z(G) = q^n(G_m) * prod r_i, removing the lowest remaining edge at every step.
GaussianRational telescope(const MultiGraph& g, const OracleFactory& factory, const GaussianRational& q,
                           const GaussianRational& y, const TelescopeObserver& observe = {},
                           const RatioOptions& opts = {});

struct ChromaticShift {
    MultiGraph graph;           // G with three universal apices forming a triangle
    GaussianRational factor;    // q (q - 1) (q - 2)
};

/// Z(G^; q, 0) = q (q - 1) (q - 2) Z(G; q - 3, 0).
ChromaticShift chromatic_shift(const MultiGraph& g, const GaussianRational& q);

} // namespace chromred
