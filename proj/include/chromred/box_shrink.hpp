#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

#include "chromred/number_field.hpp"

namespace chromred {

enum class OracleMode { Abs, Arg };
enum class Perturbation { Exact, SeededRandom, Adversarial };

OracleMode parse_oracle_mode(const std::string& s);
Perturbation parse_perturbation(const std::string& s);
std::string to_string(OracleMode m);
std::string to_string(Perturbation p);

/// The open square {z : |Re(z - m)| < D, |Im(z - m)| < D}.
struct ShrinkBox {
    GaussianRational m;
    mpq_class D;

    bool contains(const GaussianRational& z) const;
    bool contains_closed(const GaussianRational& z) const;
};

/// Approximation oracle for some f(y) = A y + B. A query returns, for some y' within eps of
/// y0, a value r with |r - log|f(y')|| <= 0.25 (abs mode) or |r - arg f(y')| <= 0.25 modulo
/// 2 pi (arg mode). When f(y') = 0 any answer is legal. Abs readings are logarithms because
/// |f| easily leaves the range of a double during shrinking.
class ApproxOracle {
public:
    virtual ~ApproxOracle() = default;
    virtual OracleMode mode() const = 0;
    virtual double query(const GaussianRational& y0, const mpq_class& eps) = 0;
};

/// Simulated oracle for a known f(y) = A y + B.
class LinearOracle : public ApproxOracle {
public:
    LinearOracle(GaussianRational a, GaussianRational b, OracleMode mode, Perturbation perturbation,
                 std::uint64_t seed = 0);

    OracleMode mode() const override { return mode_; }
    double query(const GaussianRational& y0, const mpq_class& eps) override;

    /// The point the most recent query was answered at.
    const GaussianRational& last_point() const { return last_point_; }

private:
    GaussianRational a_, b_;
    GaussianRational root_;
    double log_abs_a_ = 0, arg_a_ = 0;
    OracleMode mode_;
    Perturbation perturbation_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    GaussianRational last_point_;
};

/// Wraps another oracle and counts queries.
class CountingOracle : public ApproxOracle {
public:
    explicit CountingOracle(ApproxOracle& inner) : inner_(inner) {}
    OracleMode mode() const override { return inner_.mode(); }
    double query(const GaussianRational& y0, const mpq_class& eps) override
    {
        ++count_;
        return inner_.query(y0, eps);
    }
    std::size_t count() const { return count_; }

private:
    ApproxOracle& inner_;
    std::size_t count_ = 0;
};

// Helpers shared by simulated oracles.

/// Legal perturbations: slightly inside the 0.25 bound so that rounding keeps them legal.
inline constexpr double kPerturbation = 0.25 * (1 - 1e-9);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);
/// Uniform in [-1, 1) from a hash value.
double unit_interval(std::uint64_t h);
/// Reduce to (-pi, pi].
double reduce_angle(double a);
/// An exact point strictly inside the disc B(center, eps), in direction (dx, dy) scaled by
/// `fraction` of the radius; (dx, dy) need not be normalised.
GaussianRational point_in_disc(const GaussianRational& center, const mpq_class& eps, double dx, double dy,
                               double fraction);

enum class ZeroTest { IsZero, NonZero };

ZeroTest zero_test(ApproxOracle& oracle, const mpq_class& C);

ShrinkBox shrink_step(const ShrinkBox& box, ApproxOracle& oracle);

/// Smallest n with (7/8)^n C^2 <= delta / 2.
std::size_t shrink_steps_needed(const mpq_class& C, const mpq_class& delta);

struct ZeroA {};
struct Localized {
    GaussianRational estimate;
    ShrinkBox box;
    std::size_t steps = 0;
};
using LocalizeOutcome = std::variant<ZeroA, Localized>;

using BoxObserver = std::function<void(std::size_t step, const ShrinkBox& box)>;

/// Either reports A = 0, or localises -B/A to B_inf(estimate, delta/2).
LocalizeOutcome localize(ApproxOracle& oracle, const mpq_class& C, const mpq_class& delta,
                         const BoxObserver& observe = {});

} // namespace chromred
