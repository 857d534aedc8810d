#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lobx/path.hpp"
#include "lobx/rng.hpp"
#include "lobx/sde.hpp"

namespace lobx {

// ---------------------------------------------------------------------------
// Order placement
// ---------------------------------------------------------------------------

struct PlacementAtom {
    double offset = 0.0;  // signed distance from the center price
    double weight = 1.0;
};

// Finite placement measure: point masses plus an optional sampled density g
// on the symmetric offset grid {-K*dg, ..., K*dg}. No mass at offset 0.
struct PlacementSpec {
    std::vector<PlacementAtom> atoms;
    std::vector<double> density;  // size 2K+1 when present, centered at offset 0
    double density_dg = 0.0;      // spacing of the density offset grid

    static PlacementSpec dirac(double mu) {
        PlacementSpec p;
        p.atoms = {{-mu, 1.0}, {+mu, 1.0}};
        return p;
    }

    bool has_density() const { return !density.empty(); }

    void validate() const {
        for (const auto& a : atoms) {
            if (a.offset == 0.0)
                throw std::invalid_argument("PlacementSpec: atom at offset 0 not allowed");
            if (!(a.weight > 0.0))
                throw std::invalid_argument("PlacementSpec: atom weight must be > 0");
        }
        if (has_density()) {
            if (density.size() % 2 == 0)
                throw std::invalid_argument("PlacementSpec: density grid must be symmetric (odd size)");
            if (!(density_dg > 0.0))
                throw std::invalid_argument("PlacementSpec: density_dg must be > 0");
            double sum = 0.0;
            for (double g : density) {
                if (!(g >= 0.0) || !std::isfinite(g))
                    throw std::invalid_argument("PlacementSpec: density must be finite and >= 0");
                sum += g;
            }
            if (!std::isfinite(sum))
                throw std::invalid_argument("PlacementSpec: density not integrable");
        }
        if (atoms.empty() && !has_density())
            throw std::invalid_argument("PlacementSpec: empty placement");
    }

    // Smallest positive support point; the effective displacement of the book.
    double min_positive_support() const {
        double mu = std::numeric_limits<double>::infinity();
        for (const auto& a : atoms)
            if (a.offset > 0.0) mu = std::min(mu, a.offset);
        if (has_density()) {
            const long k0 = static_cast<long>(density.size() / 2);
            for (long k = 1; k <= k0; ++k)
                if (density[static_cast<std::size_t>(k0 + k)] > 0.0) {
                    mu = std::min(mu, static_cast<double>(k) * density_dg);
                    break;
                }
        }
        return mu;
    }
};

// ---------------------------------------------------------------------------
// The tau recursion
// ---------------------------------------------------------------------------

// One detected switch time of the alternating drawup/drawdown recursion.
// `anchor` seeds the next interval's running extremum: the exact touch level
// when the event was produced by sub-grid (bridge) thinning, the grid value
// when produced by an on-grid crossing.
struct TauPoint {
    std::size_t index = 0;
    double time = 0.0;
    double anchor = 0.0;
    bool starts_odd = false;  // true: switch into the running-max regime
};

struct TauOptions {
    bool bridge_thinning = false;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    std::uint64_t rng_tag = rng_tag::tau_thinning;
};

struct TauSequence {
    std::vector<TauPoint> points;  // tau_1, tau_2, ...; tau_0 = 0 is implicit
    double horizon = 0.0;

    std::vector<double> times() const {
        std::vector<double> t;
        t.reserve(points.size() + 1);
        t.push_back(0.0);
        for (const auto& p : points) t.push_back(p.time);
        return t;
    }
};

// Alternating first-passage recursion: starting from tau_0 = 0 the path is
// watched for a rise of mu above its running minimum (even intervals), then a
// fall of mu below its running maximum (odd intervals), and so on. Events are
// reported at the first grid index where the crossing has happened; with
// bridge thinning enabled a sub-grid touch of the trigger level can fire a
// switch one step early, anchored at the exact level.
inline TauSequence tau_recursion(const Path& w, double mu, const TauOptions& opts = {}) {
    if (w.kind != PathKind::brownian)
        throw std::invalid_argument("tau_recursion: path.kind must be brownian");
    if (!(mu > 0.0)) throw std::invalid_argument("tau_recursion: mu must be > 0");

    TauSequence seq;
    seq.horizon = w.horizon();
    CounterRng rng = CounterRng::stream(opts.seed, opts.path_index, opts.rng_tag);

    bool odd = false;          // false: hunting Gamma (drawup), true: hunting Psi
    double ext = w.values[0];  // running min (even) or max (odd) since the anchor
    const double dt = w.dt;
    const std::size_t n = w.values.size();

    for (std::size_t i = 1; i < n; ++i) {
        const double wi = w.values[i];
        if (!odd) {
            ext = std::min(ext, wi);
            if (wi - ext >= mu) {
                seq.points.push_back({i, w.time_at(i), wi, true});
                odd = true;
                ext = wi;
                continue;
            }
            if (opts.bridge_thinning && i + 1 < n) {
                const double level = ext + mu;
                const double prod = (level - wi) * (level - w.values[i + 1]);
                if (prod < 12.0 * dt) {
                    const double p = bridge_hit_prob(wi, w.values[i + 1], dt, level);
                    if (rng.bernoulli(p)) {
                        seq.points.push_back({i + 1, w.time_at(i + 1), level, true});
                        odd = true;
                        ext = std::max(level, w.values[i + 1]);
                        ++i;  // the switch consumed step i -> i+1
                        continue;
                    }
                }
            }
        } else {
            ext = std::max(ext, wi);
            if (ext - wi >= mu) {
                seq.points.push_back({i, w.time_at(i), wi, false});
                odd = false;
                ext = wi;
                continue;
            }
            if (opts.bridge_thinning && i + 1 < n) {
                const double level = ext - mu;
                const double prod = (wi - level) * (w.values[i + 1] - level);
                if (prod < 12.0 * dt) {
                    const double p = bridge_hit_prob(wi, w.values[i + 1], dt, level);
                    if (rng.bernoulli(p)) {
                        seq.points.push_back({i + 1, w.time_at(i + 1), level, false});
                        odd = false;
                        ext = std::min(level, w.values[i + 1]);
                        ++i;
                        continue;
                    }
                }
            }
        }
    }
    return seq;
}

// Spec surface: the switch times with tau_0 = 0 prepended.
inline std::vector<double> compute_tau_sequence(const Path& w, double mu,
                                                const TauOptions& opts = {}) {
    return tau_recursion(w, mu, opts).times();
}

// ---------------------------------------------------------------------------
// Best ask / best bid
// ---------------------------------------------------------------------------

// Best ask along the grid: running-min-plus-mu on even intervals, running max
// on odd ones, with extrema re-anchored at each switch.
inline Path best_ask_path(const Path& w, const TauSequence& tau, double mu) {
    if (w.kind != PathKind::brownian)
        throw std::invalid_argument("best_ask_path: path.kind must be brownian");
    Path out;
    out.dt = w.dt;
    out.seed = w.seed;
    out.kind = PathKind::best_ask;
    out.values.resize(w.values.size());

    bool odd = false;
    double ext = w.values[0];
    std::size_t next_switch = 0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        if (next_switch < tau.points.size() && tau.points[next_switch].index == i) {
            const auto& p = tau.points[next_switch];
            odd = p.starts_odd;
            ext = p.anchor;
            ++next_switch;
        }
        ext = odd ? std::max(ext, w.values[i]) : std::min(ext, w.values[i]);
        out.values[i] = odd ? ext : ext + mu;
    }
    return out;
}

inline Path best_ask_path(const Path& w, const std::vector<double>& tau_times, double mu,
                          const TauOptions& opts = {}) {
    TauSequence seq = tau_recursion(w, mu, opts);
    const auto expect = seq.times();
    if (expect.size() != tau_times.size())
        throw std::invalid_argument("best_ask_path: tau sequence does not match this path");
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (std::abs(expect[i] - tau_times[i]) > 0.25 * w.dt)
            throw std::invalid_argument("best_ask_path: tau sequence does not match this path");
    return best_ask_path(w, seq, mu);
}

inline Path negate_path(const Path& w) {
    Path out = w;
    for (double& v : out.values) v = -v;
    return out;
}

// Bid side by the sign-flip symmetry: bid(w) = -ask(-w).
inline Path best_bid_path(const Path& w, double mu, TauOptions opts = {}) {
    opts.rng_tag = opts.rng_tag + 16;  // independent thinning stream for the bid side
    Path neg = negate_path(w);
    TauSequence tau = tau_recursion(neg, mu, opts);
    Path ask = best_ask_path(neg, tau, mu);
    Path out = negate_path(ask);
    out.kind = PathKind::best_bid;
    return out;
}

// Gap process best_ask - W; zero exactly at the detected ask trading times.
inline Path gap_path(const Path& w, const Path& ask) {
    if (ask.values.size() != w.values.size() || ask.dt != w.dt)
        throw std::invalid_argument("gap_path: mismatched grids");
    Path out;
    out.dt = w.dt;
    out.seed = w.seed;
    out.kind = PathKind::reflected;
    out.values.resize(w.values.size());
    for (std::size_t i = 0; i < w.values.size(); ++i)
        out.values[i] = std::max(0.0, ask.values[i] - w.values[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Volume field
// ---------------------------------------------------------------------------

// Level bands have width dx and are centered on multiples of dx;
// |w - j*dx| < dx/2 identifies band j.
inline long long level_band(double x, double dx) { return std::llround(x / dx); }

// Last exit time of w from level x before t: the latest grid time s <= t with
// |w(s) - x| < dx/2, and 0 if the level was never visited.
inline double last_exit_time(const Path& w, double t, double x, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("last_exit_time: dx must be > 0");
    const auto it = static_cast<long long>(std::llround(t / w.dt));
    const long long n = static_cast<long long>(w.values.size()) - 1;
    const long long band = level_band(x, dx);
    for (long long s = std::min(it, n); s >= 0; --s)
        if (level_band(w.values[static_cast<std::size_t>(s)], dx) == band)
            return w.time_at(static_cast<std::size_t>(s));
    return 0.0;
}

// One materialized column V(t, .) of the order-volume field.
struct VolumeSlice {
    double t = 0.0;
    long long band_lo = 0;
    std::vector<double> v;  // v[j - band_lo] = V(t, j*dx)

    double at_band(long long j) const {
        const long long k = j - band_lo;
        if (k < 0 || k >= static_cast<long long>(v.size())) return 0.0;
        return v[static_cast<std::size_t>(k)];
    }
    double at_level(double x, double dx) const { return at_band(level_band(x, dx)); }
};

// Snapshot container: sparse rows (only nonzero levels) at a subsampled set
// of grid times. Keeps long-horizon fields bounded in memory; single columns
// are available exactly through volume_slice.
struct VolumeField {
    double dt = 0.0;
    double dx = 0.0;
    PlacementSpec placement;
    std::vector<double> times;
    std::vector<std::vector<std::pair<long long, double>>> rows;  // (band, volume)
};

namespace detail {

// Incremental V(t, .) evaluator. Local time is estimated as occupation time
// of the dx-band around a level divided by dx; the last-exit times sigma(t,x)
// enter through per-band snapshots taken whenever the path visits a band.
class VolumeAccumulator {
public:
    VolumeAccumulator(const Path& w, const PlacementSpec& placement, double dx)
        : w_(w), placement_(placement), dx_(dx) {
        if (!(dx > 0.0)) throw std::invalid_argument("volume: dx must be > 0");
        placement.validate();
        double lo = w.values[0], hi = w.values[0];
        for (double v : w.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double pad = 0.0;
        for (const auto& a : placement.atoms) pad = std::max(pad, std::abs(a.offset));
        if (placement.has_density())
            pad = std::max(pad, placement.density_dg * static_cast<double>(placement.density.size() / 2));
        band_lo_ = level_band(lo - pad, dx) - 2;
        band_hi_ = level_band(hi + pad, dx) + 2;
        const std::size_t nb = static_cast<std::size_t>(band_hi_ - band_lo_ + 1);
        occupation_.assign(nb, 0.0);
        atom_snap_.assign(placement.atoms.size(), std::vector<double>(nb, 0.0));
        for (const auto& a : placement.atoms)
            atom_band_.push_back(std::llround(a.offset / dx));
        if (placement.has_density()) {
            const long k0 = static_cast<long>(placement.density.size() / 2);
            const long r = static_cast<long>(std::lround(
                placement.density_dg * static_cast<double>(k0) / dx));
            for (long j = -r; j <= r; ++j) {
                const double off = static_cast<double>(j) * dx;
                const double pos = off / placement.density_dg + static_cast<double>(k0);
                const long p0 = static_cast<long>(std::floor(pos));
                const double fr = pos - static_cast<double>(p0);
                double g = 0.0;
                if (p0 >= 0 && p0 + 1 < static_cast<long>(placement.density.size()))
                    g = placement.density[static_cast<std::size_t>(p0)] * (1.0 - fr) +
                        placement.density[static_cast<std::size_t>(p0 + 1)] * fr;
                else if (p0 >= 0 && p0 < static_cast<long>(placement.density.size()))
                    g = placement.density[static_cast<std::size_t>(p0)];
                density_bands_.push_back(g);
            }
            density_rad_ = r;
            density_acc_.assign(nb, 0.0);
            density_snap_.assign(nb, 0.0);
        }
        advance_to(0);
    }

    // Processes grid points up to and including index i.
    void advance_to(std::size_t i) {
        for (; next_ <= i && next_ < w_.values.size(); ++next_) {
            const std::size_t s = next_;
            const long long jb = level_band(w_.values[s], dx_);
            occupation_[idx(jb)] += 1.0;
            if (density_rad_ >= 0) {
                for (long j = -density_rad_; j <= density_rad_; ++j) {
                    const long long tb = jb + j;
                    if (tb < band_lo_ || tb > band_hi_) continue;
                    density_acc_[idx(tb)] += density_bands_[static_cast<std::size_t>(j + density_rad_)];
                }
            }
            // the visit executes band jb: freeze the reference local times
            for (std::size_t a = 0; a < atom_band_.size(); ++a) {
                const long long src = jb - atom_band_[a];
                atom_snap_[a][idx(jb)] =
                    (src >= band_lo_ && src <= band_hi_) ? occupation_[idx(src)] : 0.0;
            }
            if (density_rad_ >= 0) density_snap_[idx(jb)] = density_acc_[idx(jb)];
        }
    }

    // V(t_i, j*dx) for the last processed index; advance_to(i) must have run.
    double value_at_band(long long j) const {
        if (j < band_lo_ || j > band_hi_) return 0.0;
        const std::size_t k = idx(j);
        const long long cur = level_band(w_.values[next_ - 1], dx_);
        if (j == cur) return 0.0;  // orders at the center price are executed
        double v = 0.0;
        for (std::size_t a = 0; a < atom_band_.size(); ++a) {
            const long long src = j - atom_band_[a];
            const double L = (src >= band_lo_ && src <= band_hi_) ? occupation_[idx(src)] : 0.0;
            v += placement_.atoms[a].weight * std::max(0.0, L - atom_snap_[a][k]);
        }
        v *= w_.dt / dx_;
        if (density_rad_ >= 0)
            v += std::max(0.0, density_acc_[k] - density_snap_[k]) * w_.dt;
        return v;
    }

    VolumeSlice slice() const {
        VolumeSlice s;
        s.t = w_.time_at(next_ - 1);
        s.band_lo = band_lo_;
        s.v.resize(static_cast<std::size_t>(band_hi_ - band_lo_ + 1));
        for (long long j = band_lo_; j <= band_hi_; ++j)
            s.v[idx(j)] = value_at_band(j);
        return s;
    }

    long long band_lo() const { return band_lo_; }
    long long band_hi() const { return band_hi_; }

private:
    std::size_t idx(long long band) const { return static_cast<std::size_t>(band - band_lo_); }

    const Path& w_;
    PlacementSpec placement_;
    double dx_;
    long long band_lo_ = 0, band_hi_ = 0;
    std::size_t next_ = 0;
    std::vector<double> occupation_;
    std::vector<std::vector<double>> atom_snap_;
    std::vector<long long> atom_band_;
    std::vector<double> density_bands_;
    long density_rad_ = -1;
    std::vector<double> density_acc_, density_snap_;
};

} // namespace detail

// Exact single column V(t, .) at grid time index t_index.
inline VolumeSlice volume_slice(const Path& w, const PlacementSpec& placement, double dx,
                                std::size_t t_index) {
    if (w.kind != PathKind::brownian)
        throw std::invalid_argument("volume_slice: path.kind must be brownian");
    if (t_index >= w.values.size())
        throw std::invalid_argument("volume_slice: t_index out of range");
    detail::VolumeAccumulator acc(w, placement, dx);
    acc.advance_to(t_index);
    return acc.slice();
}

// Field snapshots every `stride` grid points (stride 0: ~512 snapshots).
inline VolumeField volume_field(const Path& w, const PlacementSpec& placement, double dx,
                                std::size_t stride = 0) {
    if (w.kind != PathKind::brownian)
        throw std::invalid_argument("volume_field: path.kind must be brownian");
    if (stride == 0) stride = std::max<std::size_t>(1, w.values.size() / 512);
    detail::VolumeAccumulator acc(w, placement, dx);
    VolumeField f;
    f.dt = w.dt;
    f.dx = dx;
    f.placement = placement;
    for (std::size_t i = 0; i < w.values.size(); i += stride) {
        acc.advance_to(i);
        VolumeSlice s = acc.slice();
        f.times.push_back(s.t);
        std::vector<std::pair<long long, double>> row;
        for (std::size_t k = 0; k < s.v.size(); ++k)
            if (s.v[k] > 0.0) row.emplace_back(s.band_lo + static_cast<long long>(k), s.v[k]);
        f.rows.push_back(std::move(row));
    }
    return f;
}

} // namespace lobx
