#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lobx {

// Jacobi theta functions in the exponential-argument parametrization
//
//   theta2(x) = 2 sum_{n>=1} exp(-(n-1/2)^2 pi x)
//   theta3(x) = 1 + 2 sum_{n>=1} exp(-n^2 pi x)
//   theta4(x) = 1 + 2 sum_{n>=1} (-1)^n exp(-n^2 pi x)
//
// and their first two derivatives in x. Partial sums are accumulated in long
// double; the returned tail_bound dominates the truncation error (geometric
// domination of the term ratio, and additionally the first omitted term for
// the alternating theta4). No modular transformation is applied: for very
// small x the series converges slowly and the term cap reports an honest
// bound instead.
struct ThetaEval {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;
};

namespace detail {

inline constexpr double PI = 3.14159265358979323846264338328;
inline constexpr int THETA_TERM_CAP = 100000;

// exponent coefficient of term n: (n-1/2)^2 pi for k=2, n^2 pi for k=3,4
inline long double theta_coeff(int k, int n) {
    const long double m = (k == 2) ? (static_cast<long double>(n) - 0.5L)
                                   : static_cast<long double>(n);
    return m * m * static_cast<long double>(PI);
}

} // namespace detail

// Series evaluation of theta_k (k in {2,3,4}) or its order-th x-derivative
// (order in {0,1,2}), to absolute tolerance tol.
inline ThetaEval theta_series(int k, int order, double x, double tol) {
    if (k < 2 || k > 4) throw std::invalid_argument("theta: k must be 2, 3 or 4");
    if (order < 0 || order > 2) throw std::invalid_argument("theta: order must be 0, 1 or 2");
    if (!(x > 0.0))
        throw std::domain_error("theta: series requires x > 0, got " + std::to_string(x));
    if (!(tol > 0.0)) throw std::invalid_argument("theta: tol must be > 0");

    const long double lx = static_cast<long double>(x);
    long double sum = 0.0L;
    long double comp = 0.0L;  // Kahan compensation
    int n = 0;
    long double bound = 0.0L;
    while (true) {
        ++n;
        const long double c = detail::theta_coeff(k, n);
        long double term = std::exp(-c * lx);
        if (order == 1) term *= -c;
        if (order == 2) term *= c * c;
        if (k == 4 && (n % 2 == 1)) term = -term;

        // Kahan-compensated accumulation
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        const long double cn = detail::theta_coeff(k, n + 1);
        long double next = std::exp(-cn * lx);
        if (order == 1) next *= cn;
        if (order == 2) next *= cn * cn;

        // |term ratio| is eventually dominated by this geometric factor
        long double ratio = std::exp(-(detail::theta_coeff(k, n + 2) - cn) * lx);
        if (order >= 1) {
            const long double grow = detail::theta_coeff(k, n + 2) / cn;
            ratio *= (order == 1) ? grow : grow * grow;
        }
        if (ratio < 1.0L) {
            bound = 2.0L * next / (1.0L - ratio);
            if (k == 4) bound = std::min(bound, 2.0L * next);
            if (static_cast<double>(bound) <= 0.1 * tol && n >= 2) break;
        }
        if (n >= detail::THETA_TERM_CAP) break;  // bound reported honestly
    }

    long double value = 2.0L * sum;
    if (k != 2 && order == 0) value += 1.0L;

    ThetaEval ev;
    ev.value = static_cast<double>(value);
    ev.terms_used = n;
    ev.tail_bound = static_cast<double>(bound);
    return ev;
}

inline ThetaEval theta(int k, double x, double tol = 1e-12) { return theta_series(k, 0, x, tol); }
inline ThetaEval theta_d1(int k, double x, double tol = 1e-12) { return theta_series(k, 1, x, tol); }
inline ThetaEval theta_d2(int k, double x, double tol = 1e-12) { return theta_series(k, 2, x, tol); }

} // namespace lobx
