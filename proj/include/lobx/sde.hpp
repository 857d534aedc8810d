#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "lobx/path.hpp"
#include "lobx/rng.hpp"

namespace lobx {

// Number of steps for a (dt, horizon) grid; the path then has n_steps+1 samples.
inline std::size_t grid_steps(double dt, double horizon) {
    if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be > 0");
    if (!(horizon >= dt)) throw std::invalid_argument("grid: horizon must be >= dt");
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

// Brownian path with exact Gaussian increments (mean 0, variance dt).
// Identical (seed, dt, horizon) gives bit-identical samples; distinct path
// indices use disjoint counter streams.
inline Path gen_bm_path(std::uint64_t seed, double dt, double horizon,
                        std::uint64_t path_index = 0) {
    const std::size_t n = grid_steps(dt, horizon);
    Path p;
    p.dt = dt;
    p.seed = seed;
    p.kind = PathKind::brownian;
    p.values.resize(n + 1);
    p.values[0] = 0.0;
    CounterRng rng = CounterRng::stream(seed, path_index, rng_tag::increments);
    const double sd = std::sqrt(dt);
    double w = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        w += sd * rng.next_gaussian();
        p.values[i] = w;
    }
    return p;
}

// Even 2mu-periodic triangle map: tri(u) = |u| on [-mu, mu], i.e. the
// distance from u to the lattice 2mu*Z.
inline double triangle_fold(double u, double mu) {
    const double period = 2.0 * mu;
    double r = std::fmod(u, period);
    if (r < 0.0) r += period;
    return std::min(r, period - r);
}

// Folds x0 + W pointwise into [0, mu] with the triangle map. The output is a
// doubly reflected Brownian motion in law (not pathwise equal to the
// Skorokhod reflection of the same driver; see skorokhod_reflect).
inline Path fold_to_drbm(const Path& path, const FoldSpec& spec) {
    if (path.kind != PathKind::brownian)
        throw std::invalid_argument("fold_to_drbm: path.kind must be brownian");
    spec.validate();
    Path out;
    out.dt = path.dt;
    out.seed = path.seed;
    out.kind = PathKind::reflected;
    out.values.resize(path.values.size());
    for (std::size_t i = 0; i < path.values.size(); ++i)
        out.values[i] = triangle_fold(spec.x0 + path.values[i], spec.mu);
    return out;
}

// Two-sided Skorokhod map of x0 + path into [0, mu], evaluated on the
// piecewise-linear interpolation of the driver (for which the map reduces to
// a clamp recursion step by step). This is the pathwise-exact doubly
// reflected version of the driver; best_ask - W equals this map applied to
// the driver mu - W.
inline Path skorokhod_reflect(const Path& path, const FoldSpec& spec) {
    if (path.kind != PathKind::brownian)
        throw std::invalid_argument("skorokhod_reflect: path.kind must be brownian");
    spec.validate();
    Path out;
    out.dt = path.dt;
    out.seed = path.seed;
    out.kind = PathKind::reflected;
    out.values.resize(path.values.size());
    double x = spec.x0;
    out.values[0] = x;
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        x += path.values[i] - path.values[i - 1];
        x = std::clamp(x, 0.0, spec.mu);
        out.values[i] = x;
    }
    return out;
}

// Probability that a Brownian bridge over one grid step from a to b touches
// `level`: exp(-2(a-level)(b-level)/dt) when both endpoints are on the same
// side, 1 on a sign change or endpoint hit. Used to de-bias boundary
// detection, which otherwise undercounts by O(sqrt(dt)).
inline double bridge_hit_prob(double a, double b, double dt, double level) {
    const double u = a - level;
    const double v = b - level;
    if (u * v <= 0.0) return 1.0;
    const double p = std::exp(-2.0 * u * v / dt);
    return std::min(p, 1.0);
}

// Exact draw of the maximum of a Brownian bridge from a to b over one step,
// by inverting P(M >= m) = exp(-2(m-a)(m-b)/dt). `u` is uniform on (0,1].
inline double sample_bridge_max(double a, double b, double dt, double u) {
    const double d = a - b;
    const double s = std::sqrt(d * d - 2.0 * dt * std::log(u));
    return 0.5 * (a + b + s);
}

// Minimum counterpart, by symmetry.
inline double sample_bridge_min(double a, double b, double dt, double u) {
    const double d = a - b;
    const double s = std::sqrt(d * d - 2.0 * dt * std::log(u));
    return 0.5 * (a + b - s);
}

} // namespace lobx
