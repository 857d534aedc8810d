#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "lobx/errors.hpp"
#include "lobx/quadrature.hpp"
#include "lobx/theta.hpp"

namespace lobx {

// Closed forms for the excursion-length laws under the trading intensity
// measure, the theta tail table, and the avalanche-length Laplace transforms.
// All functions are pure and reentrant. Laplace arguments are real lambda > 0.

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline long double coth(long double z) { return 1.0L / std::tanh(z); }
inline long double csch(long double z) { return 1.0L / std::sinh(z); }

} // namespace detail

// --- hyperbolic table -------------------------------------------------------

// n[1 - exp(-lambda R); H < y] = -1/(2y) + (1/2) sqrt(2 lambda) coth(y sqrt(2 lambda))
inline double laplace_R_below(double lambda, double y, double mu) {
    detail::require(lambda > 0.0, "laplace_R_below: lambda must be > 0");
    detail::require(mu > 0.0, "laplace_R_below: mu must be > 0");
    detail::require(y > 0.0 && y <= mu, "laplace_R_below: y must be in (0, mu]");
    const long double s = std::sqrt(2.0L * static_cast<long double>(lambda));
    return static_cast<double>(-0.5L / y + 0.5L * s * detail::coth(y * s));
}

// Excursions ending in a rise trade: n[1 - exp(-lambda R_I)]  (coth form)
inline double laplace_RI(double lambda, double mu) { return laplace_R_below(lambda, mu, mu); }

// Excursions ending in a displacement trade: n[1 - exp(-lambda R_II)]  (csch form)
inline double laplace_RII(double lambda, double mu) {
    detail::require(lambda > 0.0, "laplace_RII: lambda must be > 0");
    detail::require(mu > 0.0, "laplace_RII: mu must be > 0");
    const long double s = std::sqrt(2.0L * static_cast<long double>(lambda));
    return static_cast<double>(0.5L / mu - s * detail::csch(2.0L * mu * s));
}

// All excursions: n[1 - exp(-lambda R)] = (1/2) sqrt(2 lambda) tanh(mu sqrt(2 lambda))
inline double laplace_R(double lambda, double mu) {
    detail::require(lambda > 0.0, "laplace_R: lambda must be > 0");
    detail::require(mu > 0.0, "laplace_R: mu must be > 0");
    const long double s = std::sqrt(2.0L * static_cast<long double>(lambda));
    return static_cast<double>(0.5L * s * std::tanh(mu * s));
}

// Alternative forms: n[1 - exp(-lambda R) I_{H<mu}] and n[exp(-lambda R) I_{H=mu}].
inline double laplace_RI_alt(double lambda, double mu) {
    detail::require(lambda > 0.0 && mu > 0.0, "laplace_RI_alt: domain");
    const long double s = std::sqrt(2.0L * static_cast<long double>(lambda));
    return static_cast<double>(0.5L * s * detail::coth(mu * s));
}
inline double laplace_RII_alt(double lambda, double mu) {
    detail::require(lambda > 0.0 && mu > 0.0, "laplace_RII_alt: domain");
    const long double s = std::sqrt(2.0L * static_cast<long double>(lambda));
    return static_cast<double>(s * detail::csch(2.0L * mu * s));
}

// --- theta tail table -------------------------------------------------------

inline constexpr double THETA_TOL = 1e-12;

// n[R > x] = (1/2mu) theta2(pi x / (2 mu^2))
inline double tail_R(double x, double mu) {
    detail::require(x > 0.0, "tail_R: x must be > 0");
    detail::require(mu > 0.0, "tail_R: mu must be > 0");
    return theta(2, detail::PI * x / (2.0 * mu * mu), THETA_TOL).value / (2.0 * mu);
}

// n[R > x, H < y] = (1/2y) [theta3(pi x / (2 y^2)) - 1]
inline double tail_R_below(double x, double y, double mu) {
    detail::require(x > 0.0, "tail_R_below: x must be > 0");
    detail::require(mu > 0.0, "tail_R_below: mu must be > 0");
    detail::require(y > 0.0 && y <= mu, "tail_R_below: y must be in (0, mu]");
    return (theta(3, detail::PI * x / (2.0 * y * y), THETA_TOL).value - 1.0) / (2.0 * y);
}

// n[R > x, H = mu] = (1/2mu) [1 - theta4(pi x / (8 mu^2))]. At x = 0 the
// series limit theta4(0+) = 0 gives 1/(2mu) = n[H = mu]; the limit value is
// returned without evaluating the series there.
inline double tail_R_typeII(double x, double mu) {
    detail::require(x >= 0.0, "tail_R_typeII: x must be >= 0");
    detail::require(mu > 0.0, "tail_R_typeII: mu must be > 0");
    if (x == 0.0) return 0.5 / mu;
    return (1.0 - theta(4, detail::PI * x / (8.0 * mu * mu), THETA_TOL).value) / (2.0 * mu);
}

// Excursion length density h(x) = -(pi / 4 mu^3) theta2'(pi x / (2 mu^2)).
inline double density_R(double x, double mu) {
    detail::require(x > 0.0, "density_R: x must be > 0");
    detail::require(mu > 0.0, "density_R: mu must be > 0");
    return -detail::PI / (4.0 * mu * mu * mu) *
           theta_d1(2, detail::PI * x / (2.0 * mu * mu), THETA_TOL).value;
}

// --- avalanche transforms ---------------------------------------------------

// E[exp(-lambda A_eps)] = H(eps) / (H(eps) + int_0^eps (1 - e^{-lambda x}) h(x) dx),
// with H(eps) = n[R > eps]. The integrand has an integrable x^{-1/2}
// singularity at 0 (the 1 - e^{-lambda x} factor tames h ~ x^{-3/2}).
inline double avalanche_laplace(double lambda, double eps, double mu, double rel_tol = 1e-10,
                                double* error_bound = nullptr) {
    detail::require(lambda > 0.0, "avalanche_laplace: lambda must be > 0");
    detail::require(eps > 0.0, "avalanche_laplace: eps must be > 0");
    detail::require(mu > 0.0, "avalanche_laplace: mu must be > 0");
    const double H = tail_R(eps, mu);
    const auto integrand = [lambda, mu](double x) {
        return -std::expm1(-lambda * x) * density_R(x, mu);
    };
    // scale of the integral for the absolute tolerance handed to quadrature
    const double scale = std::max(H, lambda * eps * density_R(eps, mu));
    QuadResult q = integrate_dyadic_to_zero(integrand, eps, rel_tol * scale);
    const double val = H / (H + q.value);
    if (error_bound) *error_bound = q.error_bound / (H + q.value);
    return val;
}

// Rise-trades-only avalanche length: E[exp(-lambda L_eps)] =
// 1 / (sqrt(lambda eps pi) erf(sqrt(lambda eps)) + exp(-lambda eps)).
inline double dassios_wu_laplace(double lambda, double eps) {
    detail::require(lambda > 0.0, "dassios_wu_laplace: lambda must be > 0");
    detail::require(eps > 0.0, "dassios_wu_laplace: eps must be > 0");
    const long double le = static_cast<long double>(lambda) * eps;
    const long double den =
        std::sqrt(le * static_cast<long double>(detail::PI)) * std::erf(std::sqrt(le)) +
        std::exp(-le);
    return static_cast<double>(1.0L / den);
}

} // namespace lobx
