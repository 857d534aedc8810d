#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobx/errors.hpp"
#include "lobx/excursions.hpp"
#include "lobx/path.hpp"
#include "lobx/rng.hpp"
#include "lobx/sde.hpp"

namespace lobx {

struct AvalancheRecord {
    double a = 0.0;           // start (a trade time)
    double b = 0.0;           // end (a trade time)
    double length = 0.0;      // b - a; zero for a single isolated trade
    std::size_t n_trades = 0;
    enum class Kind { full, typeI_only } kind = Kind::full;
    bool truncated = false;   // closure not confirmed before the horizon
    bool initial = false;     // admitted through the (a - eps)_+ convention
};

// Greedy clustering of sorted trade times: gaps <= eps merge, clusters
// bounded by gaps > eps on both sides become records. A cluster whose trailing
// gap cannot be confirmed before the horizon is flagged truncated.
inline std::vector<AvalancheRecord> detect_avalanches(const std::vector<double>& trading_times,
                                                      double eps, double horizon,
                                                      AvalancheRecord::Kind kind =
                                                          AvalancheRecord::Kind::full) {
    if (!(eps > 0.0)) throw std::invalid_argument("detect_avalanches: eps must be > 0");
    for (std::size_t i = 1; i < trading_times.size(); ++i)
        if (trading_times[i] < trading_times[i - 1])
            throw std::invalid_argument("detect_avalanches: trading_times must be sorted");
    std::vector<AvalancheRecord> out;
    if (trading_times.empty()) return out;

    AvalancheRecord cur;
    cur.kind = kind;
    cur.a = cur.b = trading_times.front();
    cur.n_trades = 1;
    cur.initial = trading_times.front() < eps;
    for (std::size_t i = 1; i < trading_times.size(); ++i) {
        const double t = trading_times[i];
        if (t - cur.b <= eps) {
            cur.b = t;
            ++cur.n_trades;
        } else {
            cur.length = cur.b - cur.a;
            out.push_back(cur);
            cur = AvalancheRecord{};
            cur.kind = kind;
            cur.a = cur.b = t;
            cur.n_trades = 1;
        }
    }
    cur.length = cur.b - cur.a;
    cur.truncated = cur.b + eps > horizon;
    out.push_back(cur);
    return out;
}

// Sample mean and standard error of exp(-lambda * length) over non-truncated
// records.
inline Estimate mc_laplace_avalanche(const std::vector<AvalancheRecord>& records,
                                     double lambda) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
        if (r.truncated) continue;
        const double v = std::exp(-lambda * r.length);
        sum += v;
        sum2 += v * v;
        ++n;
    }
    if (n < 100)
        throw insufficient_data("mc_laplace_avalanche: " + std::to_string(n) +
                                " records, need 100");
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum2 - nn * mean * mean) / (nn - 1.0));
    return {mean, std::sqrt(var / nn), n};
}

struct TypeIOptions {
    double tol_levels = 0.0;  // 0: exact running-max touches only
    double dx = 0.01;
    bool bridge_augment = false;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

// Trades of the book with displacement trades ignored: the times where the
// path sits on its running maximum (within tol*dx). With augmentation,
// sub-grid touches of the maximum are thinned in and reported at the nearer
// grid time.
inline std::vector<double> simulate_typeI_only_trades(const Path& w,
                                                      const TypeIOptions& opts = {}) {
    if (w.kind != PathKind::brownian)
        throw std::invalid_argument("simulate_typeI_only_trades: path.kind must be brownian");
    const double band = opts.tol_levels * opts.dx;
    const double dt = w.dt;
    std::vector<double> out;
    CounterRng rng = CounterRng::stream(opts.seed, opts.path_index, rng_tag::trade_thinning);
    double m = w.values[0];
    double gap_prev = 0.0;  // m - w at the previous grid point
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        m = std::max(m, w.values[i]);
        const double gap = m - w.values[i];
        if (gap <= band) {
            out.push_back(w.time_at(i));
        } else if (opts.bridge_augment && i > 0 && gap_prev > band) {
            if (gap_prev * gap < 12.0 * dt) {
                const double p = bridge_hit_prob(gap_prev, gap, dt, 0.0);
                if (rng.bernoulli(p))
                    out.push_back(w.time_at(gap_prev <= gap ? i - 1 : i));
            }
        }
        gap_prev = gap;
    }
    // augmentation can emit the left endpoint after the right one was pushed
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace lobx
