#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lobx/book.hpp"
#include "lobx/path.hpp"
#include "lobx/rng.hpp"
#include "lobx/sde.hpp"

namespace lobx {

enum class Side { ask, bid };
enum class Major { I, II };
enum class Minor { a, b, c, d };

inline char to_char(Minor m) { return m == Minor::a ? 'a' : m == Minor::b ? 'b' : m == Minor::c ? 'c' : 'd'; }
inline const char* to_string(Major m) { return m == Major::I ? "I" : "II"; }
inline const char* to_string(Side s) { return s == Side::ask ? "ask" : "bid"; }

struct TradeEvent {
    double t = 0.0;
    double level = 0.0;
    Side side = Side::ask;
    Major major = Major::II;
    Minor minor = Minor::c;
    bool proper = false;
    std::size_t index = 0;  // grid index
};

struct DetectOptions {
    double tol_levels = 1.0;
    double dx = 0.01;
    bool bridge_augment = false;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

// Grid times where the path sits on the best ask within tol*dx. With
// augmentation, steps whose endpoints both miss the band are thinned with the
// bridge touch probability of level 0 for the gap ask-W, so sub-grid
// trades are represented at the adjacent grid time.
inline std::vector<std::size_t> detect_trading_times(const Path& w, const Path& ask,
                                                     const DetectOptions& opts = {}) {
    if (ask.values.size() != w.values.size() || ask.dt != w.dt)
        throw std::invalid_argument("detect_trading_times: mismatched grids");
    const double band = opts.tol_levels * opts.dx;
    const double dt = w.dt;
    const std::size_t n = w.values.size();
    std::vector<char> flagged(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        flagged[i] = (ask.values[i] - w.values[i] <= band) ? 1 : 0;
    if (opts.bridge_augment) {
        CounterRng rng = CounterRng::stream(opts.seed, opts.path_index, rng_tag::trade_thinning);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (flagged[i] || flagged[i + 1]) continue;
            const double a = ask.values[i] - w.values[i];
            const double b = ask.values[i + 1] - w.values[i + 1];
            if (a * b > 12.0 * dt) continue;  // touch probability < 4e-11
            const double p = bridge_hit_prob(a, b, dt, 0.0);
            if (rng.bernoulli(p)) flagged[a <= b ? i : i + 1] = 1;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (flagged[i]) out.push_back(i);
    return out;
}

struct ClassifyOptions {
    double eps_acc = 0.0;    // accumulation window; must be >= dt
    double tie_tol = 0.0;    // ask-level comparison tolerance (typically tol*dx)
};

// Major type: ask decreased since the last detected trade (or first trade)
// -> II, otherwise I (ties are I). Minor type is the grid-operational
// accumulation test: another detected trade within eps_acc before/after.
inline std::vector<TradeEvent> classify_trades(const std::vector<std::size_t>& trading,
                                               const Path& ask, const ClassifyOptions& opts) {
    if (trading.empty()) return {};
    if (!(opts.eps_acc >= ask.dt))
        throw std::invalid_argument("classify_trades: eps_acc must be >= dt");
    std::vector<TradeEvent> out;
    out.reserve(trading.size());
    for (std::size_t k = 0; k < trading.size(); ++k) {
        const std::size_t i = trading[k];
        TradeEvent e;
        e.index = i;
        e.t = ask.time_at(i);
        e.level = ask.values[i];
        e.side = Side::ask;
        if (k == 0) {
            e.major = Major::II;
        } else {
            const double prev = ask.values[trading[k - 1]];
            e.major = (prev > e.level + opts.tie_tol) ? Major::II : Major::I;
        }
        const bool before = k > 0 && (e.t - ask.time_at(trading[k - 1])) <= opts.eps_acc;
        const bool after =
            k + 1 < trading.size() && (ask.time_at(trading[k + 1]) - e.t) <= opts.eps_acc;
        e.minor = before ? (after ? Minor::a : Minor::b) : (after ? Minor::c : Minor::d);
        out.push_back(e);
    }
    return out;
}

// First entry into a high level x > mu: locates the first grid hit, checks it
// is a detected trading time, and returns its classification. Empty when the
// level is not reached before the horizon.
inline std::optional<TradeEvent> first_hit_trade_check(const Path& w, double mu, double x,
                                                       const DetectOptions& dopts,
                                                       const ClassifyOptions& copts) {
    if (!(x > mu))
        throw std::invalid_argument("first_hit_trade_check: requires x > mu");
    std::size_t hit = w.values.size();
    for (std::size_t i = 0; i < w.values.size(); ++i)
        if (w.values[i] >= x) {
            hit = i;
            break;
        }
    if (hit == w.values.size()) return std::nullopt;

    TauOptions topts;
    topts.seed = dopts.seed;
    topts.path_index = dopts.path_index;
    TauSequence tau = tau_recursion(w, mu, topts);
    Path ask = best_ask_path(w, tau, mu);
    auto trading = detect_trading_times(w, ask, dopts);
    auto events = classify_trades(trading, ask, copts);
    for (const auto& e : events)
        if (e.index == hit) return e;
    return std::nullopt;
}

struct ProperOptions {
    double dx = 0.01;
    // Occupation estimates at a dx band are never exactly zero once a level
    // was brushed; volume below this floor counts as an empty book.
    double min_volume = 0.0;  // 0: defaults to 2*dx
};

// Marks events whose level carried strictly positive volume just before
// execution. Single forward pass over the path.
inline std::vector<TradeEvent> proper_trades(const Path& w, const PlacementSpec& placement,
                                             const std::vector<TradeEvent>& events,
                                             const ProperOptions& opts = {}) {
    if (w.kind != PathKind::brownian)
        throw std::invalid_argument("proper_trades: path.kind must be brownian");
    const double vmin = opts.min_volume > 0.0 ? opts.min_volume : 2.0 * opts.dx;
    std::vector<TradeEvent> out = events;
    detail::VolumeAccumulator acc(w, placement, opts.dx);
    for (auto& e : out) {
        if (e.index == 0) {
            e.proper = false;
            continue;
        }
        acc.advance_to(e.index - 1);
        e.proper = acc.value_at_band(level_band(e.level, opts.dx)) > vmin;
    }
    return out;
}

} // namespace lobx
