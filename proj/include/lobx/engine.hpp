#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lobx/avalanche.hpp"
#include "lobx/rng.hpp"
#include "lobx/sde.hpp"

namespace lobx {

// Streaming counterpart of the tau recursion + best-ask construction: feeds
// one grid value at a time and reports ask trading times, so paths too long
// to store can be processed in O(1) memory. Detection is the exact grid rule
// (the gap ask - w is zero precisely at running-extremum touches and at the
// recursion switches); no tolerance band.
class AskTradeStream {
public:
    AskTradeStream(double mu, double dt) : mu_(mu), dt_(dt) {}

    void reset(double w0 = 0.0) {
        odd_ = false;
        ext_ = w0;
        started_ = false;
    }

    // Feeds w at grid time t; invokes on_trade(t) for each detected trade.
    template <class OnTrade>
    void step(double t, double w, OnTrade&& on_trade) {
        if (!started_) {
            started_ = true;
            ext_ = w;
            return;  // t = 0 is not a trade: the book opens empty
        }
        if (!odd_) {
            ext_ = std::min(ext_, w);
            if (w - ext_ >= mu_) {  // switch: this is the interval-opening trade
                odd_ = true;
                ext_ = w;
                on_trade(t);
            }
        } else {
            if (w >= ext_) {  // running-max touch: gap zero
                ext_ = w;
                on_trade(t);
            } else if (ext_ - w >= mu_) {
                odd_ = false;
                ext_ = w;
            }
        }
    }

private:
    double mu_, dt_;
    double ext_ = 0.0;
    bool odd_ = false;
    bool started_ = false;
};

// Streaming running-max touch detector (displacement trades ignored).
class TypeIOnlyStream {
public:
    void reset(double w0 = 0.0) {
        m_ = w0;
        started_ = false;
    }
    template <class OnTrade>
    void step(double t, double w, OnTrade&& on_trade) {
        if (!started_) {
            started_ = true;
            m_ = w;
            on_trade(t);  // w sits on its maximum at time 0
            return;
        }
        if (w >= m_) {
            m_ = w;
            on_trade(t);
        }
    }

private:
    double m_ = 0.0;
    bool started_ = false;
};

// Online greedy avalanche clustering; emits closed records through a sink.
class AvalancheClusterer {
public:
    AvalancheClusterer(double eps, AvalancheRecord::Kind kind) : eps_(eps), kind_(kind) {}

    void on_trade(double t) {
        if (!open_) {
            open_ = true;
            cur_ = AvalancheRecord{};
            cur_.kind = kind_;
            cur_.a = cur_.b = t;
            cur_.n_trades = 1;
            cur_.initial = first_ && t < eps_;
            first_ = false;
            return;
        }
        if (t - cur_.b <= eps_) {
            cur_.b = t;
            ++cur_.n_trades;
        } else {
            cur_.length = cur_.b - cur_.a;
            records_.push_back(cur_);
            cur_ = AvalancheRecord{};
            cur_.kind = kind_;
            cur_.a = cur_.b = t;
            cur_.n_trades = 1;
        }
    }

    void finish(double horizon) {
        if (open_) {
            cur_.length = cur_.b - cur_.a;
            cur_.truncated = cur_.b + eps_ > horizon;
            records_.push_back(cur_);
            open_ = false;
        }
    }

    const std::vector<AvalancheRecord>& records() const { return records_; }
    std::vector<AvalancheRecord> take_records() { return std::move(records_); }

private:
    double eps_;
    AvalancheRecord::Kind kind_;
    AvalancheRecord cur_{};
    bool open_ = false;
    bool first_ = true;
    std::vector<AvalancheRecord> records_;
};

// One streaming pass over a Brownian path at fine resolution dt, feeding the
// full-trade detector at dt and, optionally, coarse detectors at multiples of
// dt fed with the subsampled values (the coarse walk is then coupled to the
// fine one, which isolates discretization bias from Monte Carlo noise in
// refinement studies).
struct CoupledAvalancheResult {
    std::vector<std::vector<AvalancheRecord>> per_stride;  // matches strides argument
};

inline CoupledAvalancheResult run_avalanche_path(std::uint64_t seed, std::uint64_t path_index,
                                                 double dt, double horizon, double mu,
                                                 double eps,
                                                 const std::vector<std::size_t>& strides,
                                                 bool type_one_only = false) {
    const std::size_t n = grid_steps(dt, horizon);
    CounterRng rng = CounterRng::stream(seed, path_index, rng_tag::increments);
    const double sd = std::sqrt(dt);

    std::vector<AskTradeStream> ask;
    std::vector<TypeIOnlyStream> topi;
    std::vector<AvalancheClusterer> clus;
    for (std::size_t s = 0; s < strides.size(); ++s) {
        ask.emplace_back(mu, dt * static_cast<double>(strides[s]));
        topi.emplace_back();
        clus.emplace_back(eps, type_one_only ? AvalancheRecord::Kind::typeI_only
                                             : AvalancheRecord::Kind::full);
        ask.back().reset(0.0);
        topi.back().reset(0.0);
    }
    auto feed = [&](std::size_t k, double t, double w) {
        auto sink = [&](double tt) { clus[k].on_trade(tt); };
        if (type_one_only)
            topi[k].step(t, w, sink);
        else
            ask[k].step(t, w, sink);
    };
    for (std::size_t k = 0; k < strides.size(); ++k) feed(k, 0.0, 0.0);

    double w = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        w += sd * rng.next_gaussian();
        const double t = dt * static_cast<double>(i);
        for (std::size_t k = 0; k < strides.size(); ++k)
            if (i % strides[k] == 0) feed(k, t, w);
    }
    CoupledAvalancheResult out;
    for (std::size_t k = 0; k < strides.size(); ++k) {
        clus[k].finish(horizon);
        out.per_stride.push_back(clus[k].take_records());
    }
    return out;
}

} // namespace lobx
