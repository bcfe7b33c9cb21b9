#include "chromred/reduction.hpp"

#include <cmath>
#include <numbers>

#include "chromred/error.hpp"

namespace chromred {

namespace {

GaussianRational from_int(const GaussInt& z)
{
    return {mpq_class(z.re), mpq_class(z.im)};
}

class GadgetEdgeOracle : public ApproxOracle {
public:
    GadgetEdgeOracle(GaussianRational a, GaussianRational b, SimulatedZOracle& sim, const IfsSystem& sys)
        : a_(std::move(a)), b_(std::move(b)), sim_(sim), sys_(sys)
    {
        GaussianRational qq1 = sim.q() * (sim.q() - 1);
        log_qq1_ = log_abs(qq1);
        arg_qq1_ = arg(qq1);
    }

    OracleMode mode() const override { return sim_.mode(); }

    double query(const GaussianRational& y0, const mpq_class& eps) override
    {
        Gadget h = synthesize(sys_, y0 + sim_.y(), eps);
        double r = sim_.reading(a_, b_, h);
        GaussianRational dif = from_int(h.raw.dif);
        if (sim_.mode() == OracleMode::Abs)
            return r + log_qq1_ - (log_abs(dif) - log_abs(mpq_class(h.raw.den)));
        return reduce_angle(r + arg_qq1_ - arg(dif));
    }

private:
    GaussianRational a_, b_;
    SimulatedZOracle& sim_;
    const IfsSystem& sys_;
    double log_qq1_ = 0, arg_qq1_ = 0;
};

} // namespace

SimulatedZOracle::SimulatedZOracle(GaussianRational q, GaussianRational y, OracleMode mode,
                                   Perturbation perturbation, std::uint64_t seed, BruteForceOptions brute)
    : q_(std::move(q)), y_(std::move(y)), mode_(mode), perturbation_(perturbation), seed_(seed), brute_(brute)
{
    require_nondegenerate(q_);
}

GaussianRational SimulatedZOracle::spliced_value(const GaussianRational& z_contract, const GaussianRational& z_full,
                                                 const ExactState& h) const
{
    return h.same * z_contract / q_ + h.dif * (z_full - y_ * z_contract) / (q_ * (q_ - 1));
}

double SimulatedZOracle::reading(const GaussianRational& z_contract, const GaussianRational& z_full,
                                 const Gadget& h)
{
    std::uint64_t hash = mix_seed(seed_, counter_++);
    // Work with the unreduced numerators; the common denominator only shifts log|.|.
    ExactState raw{from_int(h.raw.same), from_int(h.raw.dif)};
    GaussianRational value = spliced_value(z_contract, z_full, raw);
    if (value.is_zero())
        return mode_ == OracleMode::Abs ? 4 * unit_interval(hash) : std::numbers::pi * unit_interval(hash);

    double shift = 0;
    if (perturbation_ == Perturbation::SeededRandom)
        shift = kPerturbation * unit_interval(mix_seed(hash, 1));
    else if (perturbation_ == Perturbation::Adversarial)
        shift = (hash & 2) ? kPerturbation : -kPerturbation;

    if (mode_ == OracleMode::Abs)
        return log_abs(value) - log_abs(mpq_class(h.raw.den)) + shift;
    return reduce_angle(arg(value) + shift);
}

GaussianRational gadget_rescale(const ExactState& h, const GaussianRational& q)
{
    if (h.dif.is_zero())
        throw PreconditionError("gadget has Z^dif = 0");
    return q * (q - 1) / h.dif;
}

std::unique_ptr<ApproxOracle> edge_oracle(const MultiGraph& g, std::size_t e, SimulatedZOracle& sim,
                                          const IfsSystem& sys)
{
    GaussianRational a = z_bruteforce(contract_edge(g, e), sim.q(), sim.y(), sim.brute_force());
    GaussianRational b = z_bruteforce(g, sim.q(), sim.y(), sim.brute_force());
    return std::make_unique<GadgetEdgeOracle>(std::move(a), std::move(b), sim, sys);
}

std::unique_ptr<ApproxOracle> direct_edge_oracle(const MultiGraph& g, std::size_t e, const GaussianRational& q,
                                                 const GaussianRational& y, OracleMode mode,
                                                 Perturbation perturbation, std::uint64_t seed,
                                                 const BruteForceOptions& brute)
{
    GaussianRational a = z_bruteforce(contract_edge(g, e), q, y, brute);
    GaussianRational b = z_bruteforce(g, q, y, brute);
    return std::make_unique<LinearOracle>(std::move(a), std::move(b), mode, perturbation, seed);
}

RatioReport ratio_with_flag(const MultiGraph& g, std::size_t e, ApproxOracle& oracle, const GaussianRational& q,
                            const GaussianRational& y, const RatioOptions& opts)
{
    g.edge(e);
    HeightBudget budget = height_budget(q, y, g.vertex_count(), g.edge_count());
    if (budget.log_h / std::numbers::ln2 > static_cast<double>(opts.max_denominator_bits))
        throw DenominatorOverflow("denominator bound needs " + std::to_string(budget.log_h / std::numbers::ln2) +
                                  " bits");
    const mpq_class delta = budget.delta();
    LocalizeOutcome out = localize(oracle, budget.c(), delta);
    if (std::holds_alternative<ZeroA>(out))
        return {GaussianRational(1), false, 0};
    const auto& loc = std::get<Localized>(out);
    // The root of A y_hat + B is -Z(G)/Z(G/e). If A != 0 it is in the box and reconstructs, so
    // failure means A = B = 0, where the oracle may answer anything and any output is valid.
    try {
        GaussianRational r = rational_reconstruct(-loc.estimate, delta / 2, budget.denom_bound());
        return {r, true, loc.steps};
    } catch (const NoCandidate&) {
        return {GaussianRational(1), false, loc.steps, true};
    }
}

GaussianRational telescope(const MultiGraph& g, const OracleFactory& factory, const GaussianRational& q,
                           const GaussianRational& y, const TelescopeObserver& observe, const RatioOptions& opts)
{
    if (q.is_zero())
        throw ParameterDegenerate("telescoping needs q != 0");
    MultiGraph current = g;
    GaussianRational product = 1;
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        auto oracle = factory(current, 0);
        RatioReport rep = ratio_with_flag(current, 0, *oracle, q, y, opts);
        if (observe)
            observe({i, i, rep});
        product *= rep.r;
        current = rep.b ? contract_edge(current, 0) : delete_edge(current, 0);
    }
    return pow(q, current.vertex_count()) * product;
}

ChromaticShift chromatic_shift(const MultiGraph& g, const GaussianRational& q)
{
    return {apex_triple(g), q * (q - 1) * (q - 2)};
}

} // namespace chromred
