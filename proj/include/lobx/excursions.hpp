#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobx/errors.hpp"
#include "lobx/path.hpp"
#include "lobx/rng.hpp"
#include "lobx/sde.hpp"

namespace lobx {

// One zero-excursion of the reflected gap process. H is an exact draw of the
// path maximum given the grid skeleton (per-step Brownian-bridge maxima), so
// height statistics carry no O(sqrt(dt)) grid bias.
struct Excursion {
    double t_start = 0.0;
    double t_end = 0.0;
    double R = 0.0;
    double H = 0.0;
    bool hits_mu = false;
};

struct ExcursionSample {
    std::vector<Excursion> excursions;
    bool truncated_last = false;
    double mu = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t n_short = 0;  // excursions under the 2*dt resolution floor, discarded
};

struct ExtractOptions {
    double tol_levels = 1.0;
    double dx = 0.01;
    bool bridge_corrections = true;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

// Splits a reflected path into maximal above-band intervals between zero
// visits. With bridge corrections on, sub-grid returns to zero split
// excursions (Bernoulli with the bridge touch probability) and heights are
// sampled exactly from the per-step bridge-maximum law, capped at mu.
inline ExcursionSample extract_excursions(const Path& x, double mu,
                                          const ExtractOptions& opts = {}) {
    if (x.kind != PathKind::reflected)
        throw std::invalid_argument("extract_excursions: path.kind must be reflected");
    if (!(mu > 0.0)) throw std::invalid_argument("extract_excursions: mu must be > 0");

    ExcursionSample out;
    out.mu = mu;
    out.dt = x.dt;
    out.seed = x.seed;

    const double band = opts.tol_levels * opts.dx;
    const double dt = x.dt;
    const std::size_t n = x.values.size();

    CounterRng zrng = CounterRng::stream(opts.seed, opts.path_index, rng_tag::zero_thinning);
    CounterRng hrng = CounterRng::stream(opts.seed, opts.path_index, rng_tag::height_sampling);

    // the stretch before the first zero visit is not an excursion from zero
    std::size_t i0 = n;
    for (std::size_t i = 0; i < n; ++i)
        if (x.values[i] <= band) {
            i0 = i;
            break;
        }
    if (i0 == n) {
        out.truncated_last = false;  // never reached zero: nothing to report
        return out;
    }

    bool in_exc = false;
    double start_t = 0.0, height = 0.0;
    bool hit_top = false;

    auto close = [&](double t_end) {
        const double R = t_end - start_t;
        if (R < 2.0 * dt - 1e-12 * dt) {
            ++out.n_short;
        } else {
            Excursion e;
            e.t_start = start_t;
            e.t_end = t_end;
            e.R = R;
            e.H = hit_top ? mu : std::min(height, mu);
            e.hits_mu = hit_top || e.H >= mu - band;
            out.excursions.push_back(e);
        }
    };

    for (std::size_t i = i0; i + 1 < n; ++i) {
        const double a = x.values[i];
        const double b = x.values[i + 1];
        const bool zb = b <= band;
        if (!in_exc) {
            if (!zb) {
                in_exc = true;
                start_t = x.time_at(i);
                height = b;
                hit_top = false;
                if (opts.bridge_corrections) {
                    const double m = sample_bridge_max(a, b, dt, hrng.next_uniform());
                    if (m >= mu) hit_top = true;
                    height = std::max(height, m);
                } else {
                    height = std::max(height, std::max(a, b));
                }
            }
            continue;
        }
        // inside an excursion
        if (opts.bridge_corrections) {
            const double m = sample_bridge_max(a, b, dt, hrng.next_uniform());
            if (m >= mu) hit_top = true;
            height = std::max(height, m);
        } else {
            height = std::max(height, std::max(a, b));
        }
        if (zb) {
            close(x.time_at(i + 1));
            in_exc = false;
            continue;
        }
        if (opts.bridge_corrections && a * b < 12.0 * dt) {
            const double p = bridge_hit_prob(a, b, dt, 0.0);
            if (zrng.bernoulli(p)) {
                const double mid = x.time_at(i) + 0.5 * dt;
                close(mid);
                // reopen immediately; the next sub-excursion starts at the touch
                in_exc = true;
                start_t = mid;
                height = b;
                hit_top = false;
            }
        }
    }
    if (in_exc) out.truncated_last = true;  // runs into the horizon: excluded
    return out;
}

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// Conditional tail fraction P(R > x | H >= y) with binomial standard error.
// Ratios over the same sample estimate intensity-measure conditionals without
// a local-time normalization: n[R>x | H>=y] = 2y * n[R>x, H>=y].
inline Estimate conditional_tail_R(const ExcursionSample& sample, double y, double x) {
    if (!(y > 0.0 && y <= sample.mu))
        throw std::invalid_argument("conditional_tail_R: y must be in (0, mu]");
    std::size_t n = 0, k = 0;
    for (const auto& e : sample.excursions) {
        if (e.H >= y) {
            ++n;
            if (e.R > x) ++k;
        }
    }
    if (n < 100)
        throw insufficient_data("conditional_tail_R: only " + std::to_string(n) +
                                " excursions with H >= y, need 100");
    const double p = static_cast<double>(k) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

// Local time of the reflected path at 0 over the sample, calibrated from the
// height law: excursions exceeding height y arrive at rate 1/(2y) per unit
// local time, so 2y * count is an unbiased estimate.
inline Estimate estimate_local_time_unit(const ExcursionSample& sample, double y) {
    if (!(y > 0.0 && y <= sample.mu))
        throw std::invalid_argument("estimate_local_time_unit: y must be in (0, mu]");
    std::size_t n = 0;
    for (const auto& e : sample.excursions)
        if (e.H >= y) ++n;
    if (n < 100)
        throw insufficient_data("estimate_local_time_unit: only " + std::to_string(n) +
                                " excursions with H >= y, need 100");
    const double nn = static_cast<double>(n);
    return {2.0 * y * nn, 2.0 * y * std::sqrt(nn), n};
}

// Real time elapsed from the first zero until the end of the k-th excursion
// with H >= y; the elapsed local time there is 2y*k in expectation. Empty if
// fewer than k qualifying excursions exist.
inline std::optional<double> local_time_clock_span(const ExcursionSample& sample, double y,
                                                   std::size_t k) {
    if (sample.excursions.empty() || k == 0) return std::nullopt;
    const double t0 = sample.excursions.front().t_start;
    std::size_t seen = 0;
    for (const auto& e : sample.excursions) {
        if (e.H >= y) {
            ++seen;
            if (seen == k) return e.t_end - t0;
        }
    }
    return std::nullopt;
}

} // namespace lobx
