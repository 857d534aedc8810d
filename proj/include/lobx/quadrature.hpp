#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lobx/errors.hpp"

namespace lobx {

struct QuadResult {
    double value = 0.0;
    double error_bound = 0.0;
    int intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1, 1].
inline constexpr double GK_NODE[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double GK_WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double GK_WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fk[15];
    for (int i = 0; i < 7; ++i) {
        fk[i] = f(c - h * GK_NODE[i]);
        fk[14 - i] = f(c + h * GK_NODE[i]);
    }
    fk[7] = f(c);
    double k = GK_WK[7] * fk[7];
    for (int i = 0; i < 7; ++i) k += GK_WK[i] * (fk[i] + fk[14 - i]);
    double g = GK_WG[3] * fk[7];
    for (int i = 0; i < 3; ++i) g += GK_WG[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
    value = k * h;
    err = std::abs((k - g) * h);
}

} // namespace detail

// Adaptive Gauss-Kronrod on a finite interval. Splits the worst subinterval
// until the summed error estimate is below abs_tol; throws numeric_error with
// diagnostics when the interval budget runs out.
template <class F>
inline QuadResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                     int max_intervals = 4000) {
    struct Seg {
        double a, b, v, e;
    };
    std::vector<Seg> segs;
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    segs.push_back({a, b, v0, e0});
    while (true) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].v;
            err += segs[i].e;
            if (segs[i].e > segs[worst].e) worst = i;
        }
        if (err <= abs_tol)
            return {total, err, static_cast<int>(segs.size())};
        if (static_cast<int>(segs.size()) >= max_intervals)
            throw numeric_error("quadrature: error " + std::to_string(err) + " above tolerance " +
                                std::to_string(abs_tol) + " after " +
                                std::to_string(segs.size()) + " intervals on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
        Seg s = segs[worst];
        const double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b))
            throw numeric_error("quadrature: interval underflow near " + std::to_string(s.a));
        Seg l{s.a, m, 0, 0}, r{m, s.b, 0, 0};
        detail::gk15(f, l.a, l.b, l.v, l.e);
        detail::gk15(f, r.a, r.b, r.v, r.e);
        segs[worst] = l;
        segs.push_back(r);
    }
}

// Integral over (0, b] of an integrand with an integrable singularity at 0:
// dyadic segments [b/2^{k+1}, b/2^k], each integrated adaptively, until the
// measured geometric decay bounds the remainder below tolerance.
template <class F>
inline QuadResult integrate_dyadic_to_zero(const F& f, double b, double abs_tol,
                                           int max_levels = 400) {
    double total = 0.0, err = 0.0, prev_abs = -1.0;
    int used = 0;
    double hi = b;
    for (int k = 0; k < max_levels; ++k) {
        const double lo = 0.5 * hi;
        const double seg_tol = abs_tol / (3.0 * (k + 1) * (k + 1));
        QuadResult q = integrate_adaptive(f, lo, hi, seg_tol);
        total += q.value;
        err += q.error_bound;
        used += q.intervals;
        const double cur = std::abs(q.value);
        if (prev_abs > 0.0 && cur > 0.0) {
            const double r = cur / prev_abs;
            if (r < 0.95) {
                const double rem = cur * r / (1.0 - r);
                if (rem <= 0.5 * abs_tol && k >= 6)
                    return {total, err + rem, used};
            }
        }
        if (cur == 0.0 && k >= 6) return {total, err, used};
        prev_abs = cur;
        hi = lo;
        if (hi < 1e-300) break;
    }
    throw numeric_error("quadrature: dyadic refinement toward 0 did not converge on (0, " +
                        std::to_string(b) + "], tol " + std::to_string(abs_tol));
}

// Integral over [a, infinity) of a decaying integrand in doubling segments,
// stopping once the measured decay bounds the remaining tail.
template <class F>
inline QuadResult integrate_upper_tail(const F& f, double a, double abs_tol,
                                       int max_levels = 200) {
    double total = 0.0, err = 0.0, prev_abs = -1.0;
    int used = 0;
    double lo = a;
    for (int k = 0; k < max_levels; ++k) {
        const double hi = 2.0 * lo;
        const double seg_tol = abs_tol / (3.0 * (k + 1) * (k + 1));
        QuadResult q = integrate_adaptive(f, lo, hi, seg_tol);
        total += q.value;
        err += q.error_bound;
        used += q.intervals;
        const double cur = std::abs(q.value);
        if (prev_abs >= 0.0) {
            const double r = prev_abs > 0.0 ? cur / prev_abs : 0.0;
            if (r < 0.9) {
                const double rem = r > 0.0 ? cur * r / (1.0 - r) : cur;
                if (rem <= 0.5 * abs_tol && k >= 2)
                    return {total, err + rem, used};
            }
        }
        prev_abs = cur;
        lo = hi;
    }
    throw numeric_error("quadrature: tail refinement did not converge from " +
                        std::to_string(a) + ", tol " + std::to_string(abs_tol));
}

} // namespace lobx
