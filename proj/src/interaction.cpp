#include "chromred/interaction.hpp"

namespace chromred {

const GaussianRational& ExtendedValue::value() const
{
    if (!v_)
        throw PreconditionError("value of infinity requested");
    return *v_;
}

std::string to_string(const ExtendedValue& z)
{
    return z.is_infinite() ? std::string("inf") : to_string(z.value());
}

ExtendedValue y_eff(const ExactState& s, const GaussianRational& q)
{
    if (s.dif.is_zero()) {
        if (s.same.is_zero())
            throw PreconditionError("y_eff undefined: both state components vanish");
        return ExtendedValue::infinity();
    }
    return (q - 1) * s.same / s.dif;
}

std::complex<double> y_eff(const FloatState& s, std::complex<double> q)
{
    return (q - 1.0) * s.same / s.dif;
}

bool in_hstar(const ExactState& s, const GaussianRational& q)
{
    return !s.dif.is_zero() && (q - 1) * s.same != s.dif;
}

ExtendedValue f_q(const ExtendedValue& z, const GaussianRational& q)
{
    if (q.is_zero())
        throw ParameterDegenerate("f_q needs q != 0");
    if (z.is_infinite())
        return 1;
    if (z.value() == GaussianRational(1))
        return ExtendedValue::infinity();
    return 1 + q / (z.value() - 1);
}

std::complex<double> f_q(std::complex<double> z, std::complex<double> q)
{
    return 1.0 + q / (z - 1.0);
}

namespace {

ExtendedValue times(const ExtendedValue& a, const ExtendedValue& b)
{
    if (a.is_infinite() || b.is_infinite()) {
        const ExtendedValue& other = a.is_infinite() ? b : a;
        if (!other.is_infinite() && other.value().is_zero())
            throw ExceptionalPair("product of 0 and infinity");
        return ExtendedValue::infinity();
    }
    return a.value() * b.value();
}

} // namespace

ExtendedValue g_map(const ExtendedValue& z, const GaussianRational& q, const GaussianRational& y_base)
{
    require_nondegenerate(q);
    if (z.is_infinite())
        return y_base;
    GaussianRational num = q - 1 + z.value() * y_base;
    GaussianRational den = q - 2 + z.value() + y_base;
    if (den.is_zero()) {
        if (num.is_zero())
            throw ExceptionalPair("g is degenerate for this base value");
        return ExtendedValue::infinity();
    }
    return num / den;
}

ExtendedValue parallel_law(const ExtendedValue& a, const ExtendedValue& b)
{
    return times(a, b);
}

ExtendedValue series_law(const ExtendedValue& a, const ExtendedValue& b, const GaussianRational& q)
{
    return f_q(times(f_q(a, q), f_q(b, q)), q);
}

} // namespace chromred
