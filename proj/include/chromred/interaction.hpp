#pragma once

#include <complex>
#include <optional>
#include <string>

#include "chromred/error.hpp"
#include "chromred/number_field.hpp"

namespace chromred {

/// (Z^same, Z^dif) of a two-terminal graph: terminals in the same / different parts.
/// Works over exact Gaussian rationals and over std::complex<double>.
template <class Scalar>
struct InteractionState {
    Scalar same{};
    Scalar dif{};

    Scalar z() const { return same + dif; }
    friend bool operator==(const InteractionState&, const InteractionState&) = default;
};

using ExactState = InteractionState<GaussianRational>;
using FloatState = InteractionState<std::complex<double>>;

template <class Scalar>
void require_nondegenerate(const Scalar& q)
{
    if (q == Scalar(0) || q == Scalar(1))
        throw ParameterDegenerate("q must avoid 0 and 1");
}

template <class Scalar>
InteractionState<Scalar> edge_state(const Scalar& q, const Scalar& y)
{
    return {q * y, q * (q - Scalar(1))};
}

template <class Scalar>
InteractionState<Scalar> compose_parallel(const InteractionState<Scalar>& a, const InteractionState<Scalar>& b,
                                          const Scalar& q)
{
    require_nondegenerate(q);
    return {a.same * b.same / q, a.dif * b.dif / (q * (q - Scalar(1)))};
}

template <class Scalar>
InteractionState<Scalar> compose_series(const InteractionState<Scalar>& a, const InteractionState<Scalar>& b,
                                        const Scalar& q)
{
    require_nondegenerate(q);
    Scalar qq1 = q * (q - Scalar(1));
    Scalar dd = a.dif * b.dif / qq1;
    return {a.same * b.same / q + dd,
            (a.same * b.dif + a.dif * b.same) / q + (q - Scalar(2)) * dd};
}

/// Extended value in Q(i) u {infinity}.
class ExtendedValue {
public:
    ExtendedValue(GaussianRational v) : v_(std::move(v)) {}
    ExtendedValue(long v) : v_(GaussianRational(v)) {}
    static ExtendedValue infinity() { return ExtendedValue(); }

    bool is_infinite() const { return !v_.has_value(); }
    const GaussianRational& value() const;

    friend bool operator==(const ExtendedValue&, const ExtendedValue&) = default;

private:
    ExtendedValue() = default;
    std::optional<GaussianRational> v_;
};

std::string to_string(const ExtendedValue& z);

/// (q-1) Z^same / Z^dif, infinite when Z^dif = 0 < |Z^same|. Both zero has no value.
ExtendedValue y_eff(const ExactState& s, const GaussianRational& q);
std::complex<double> y_eff(const FloatState& s, std::complex<double> q);

/// Z^dif != 0 and y_eff != 1.
bool in_hstar(const ExactState& s, const GaussianRational& q);

/// f_q(z) = 1 + q / (z - 1); an involution of the extended plane.
ExtendedValue f_q(const ExtendedValue& z, const GaussianRational& q);
std::complex<double> f_q(std::complex<double> z, std::complex<double> q);

/// g(z) = f_q(f_q(z) f_q(y_base)): interaction of a graph with effective value z
/// put in series with the base gadget.
ExtendedValue g_map(const ExtendedValue& z, const GaussianRational& q, const GaussianRational& y_base);

// Value-level composition laws. They throw ExceptionalPair on pairs where the law breaks.
ExtendedValue parallel_law(const ExtendedValue& a, const ExtendedValue& b);
ExtendedValue series_law(const ExtendedValue& a, const ExtendedValue& b, const GaussianRational& q);

} // namespace chromred
