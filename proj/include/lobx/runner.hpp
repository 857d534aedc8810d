#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lobx/analytics.hpp"
#include "lobx/avalanche.hpp"
#include "lobx/book.hpp"
#include "lobx/config.hpp"
#include "lobx/csv.hpp"
#include "lobx/engine.hpp"
#include "lobx/errors.hpp"
#include "lobx/excursions.hpp"
#include "lobx/mc.hpp"
#include "lobx/report.hpp"
#include "lobx/sde.hpp"
#include "lobx/trades.hpp"

namespace lobx {

namespace detail {

inline void write_tau_csv(const std::string& path, const std::vector<double>& tau) {
    CsvWriter csv(path);
    csv.header("n,tau_n");
    for (std::size_t i = 0; i < tau.size(); ++i)
        csv.field(i).field(tau[i]).endrow();
}

inline void write_timeline_csv(const std::string& path, const Path& w, const Path& ask,
                               const Path& bid, std::size_t stride) {
    CsvWriter csv(path);
    csv.header("t,ask,bid");
    for (std::size_t i = 0; i < w.values.size(); i += stride)
        csv.field(w.time_at(i)).field(ask.values[i]).field(bid.values[i]).endrow();
}

inline void write_events_csv(const std::string& path, const std::vector<TradeEvent>& events) {
    CsvWriter csv(path);
    csv.header("t,level,side,major,minor,proper");
    for (const auto& e : events) {
        csv.field(e.t)
            .field(e.level)
            .field(std::string(to_string(e.side)))
            .field(std::string(to_string(e.major)))
            .field(std::string(1, to_char(e.minor)))
            .field(std::string(e.proper ? "1" : "0"))
            .endrow();
    }
}

inline void write_excursions_csv(const std::string& path,
                                 const std::vector<Excursion>& excursions) {
    CsvWriter csv(path);
    csv.header("t_start,t_end,R,H,hits_mu");
    for (const auto& e : excursions)
        csv.field(e.t_start)
            .field(e.t_end)
            .field(e.R)
            .field(e.H)
            .field(std::string(e.hits_mu ? "1" : "0"))
            .endrow();
}

inline void write_volume_csv(const std::string& path, const VolumeField& f) {
    CsvWriter csv(path);
    csv.header("t,x,volume");
    for (std::size_t r = 0; r < f.times.size(); ++r)
        for (const auto& [band, v] : f.rows[r])
            csv.field(f.times[r]).field(static_cast<double>(band) * f.dx).field(v).endrow();
}

inline void write_avalanches_csv(const std::string& path,
                                 const std::vector<AvalancheRecord>& records) {
    CsvWriter csv(path);
    csv.header("a,b,length,n_trades,kind,truncated");
    for (const auto& r : records)
        csv.field(r.a)
            .field(r.b)
            .field(r.length)
            .field(r.n_trades)
            .field(std::string(r.kind == AvalancheRecord::Kind::full ? "full" : "typeI_only"))
            .field(std::string(r.truncated ? "1" : "0"))
            .endrow();
}

inline StatLine make_stat(const std::string& name, double emp, double se, double ref) {
    StatLine s;
    s.name = name;
    s.empirical = emp;
    s.se = se;
    s.reference = ref;
    s.z = z_score(emp, se, ref);
    return s;
}

inline StatLine make_insufficient(const std::string& name, const std::string& why) {
    StatLine s;
    s.name = name;
    s.insufficient = true;
    s.note = why;
    return s;
}

// Shared per-path production of the reflected gap process and its excursions.
inline ExcursionSample path_excursions(const ExperimentConfig& c, std::size_t path_index) {
    Path w = gen_bm_path(c.seed, c.dt, c.horizon, path_index);
    TauOptions topts;
    topts.bridge_thinning = true;
    topts.seed = c.seed;
    topts.path_index = path_index;
    TauSequence tau = tau_recursion(w, c.mu, topts);
    Path ask = best_ask_path(w, tau, c.mu);
    Path x = gap_path(w, ask);
    ExtractOptions eo;
    eo.tol_levels = c.tol_levels;
    eo.dx = c.dx;
    eo.seed = c.seed;
    eo.path_index = path_index;
    return extract_excursions(x, c.mu, eo);
}

} // namespace detail

// --- mode pipelines ---------------------------------------------------------

inline RunReport run_simulate(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    RunReport rep;
    rep.config = c;
    fs::create_directories(c.output_dir);

    // full artifact set for the first path
    Path w = gen_bm_path(c.seed, c.dt, c.horizon, 0);
    TauOptions topts;
    topts.bridge_thinning = true;
    topts.seed = c.seed;
    TauSequence tau = tau_recursion(w, c.mu, topts);
    Path ask = best_ask_path(w, tau, c.mu);
    Path bid = best_bid_path(w, c.mu, topts);

    DetectOptions dopts;
    dopts.tol_levels = c.tol_levels;
    dopts.dx = c.dx;
    dopts.bridge_augment = true;
    dopts.seed = c.seed;
    auto trading = detect_trading_times(w, ask, dopts);
    ClassifyOptions copts{c.resolved_eps_acc(), c.tol_levels * c.dx};
    auto events = classify_trades(trading, ask, copts);
    events = proper_trades(w, PlacementSpec::dirac(c.mu), events, {c.dx, 0.0});

    const std::size_t stride = std::max<std::size_t>(1, w.values.size() / 2000);
    detail::write_tau_csv(c.output_dir + "/tau.csv", tau.times());
    detail::write_timeline_csv(c.output_dir + "/timeline.csv", w, ask, bid, stride);
    detail::write_events_csv(c.output_dir + "/trades.csv", events);
    VolumeField field = volume_field(w, PlacementSpec::dirac(c.mu), c.dx);
    detail::write_volume_csv(c.output_dir + "/volume.csv", field);

    // excursions pooled over all paths
    auto per_path = run_paths<ExcursionSample>(
        static_cast<std::size_t>(c.n_paths), c.threads,
        [&](std::size_t i) { return detail::path_excursions(c, i); });
    std::vector<Excursion> pool;
    for (const auto& s : per_path)
        pool.insert(pool.end(), s.excursions.begin(), s.excursions.end());
    detail::write_excursions_csv(c.output_dir + "/excursions.csv", pool);

    StatLine count;
    count.name = "excursions_total";
    count.empirical = static_cast<double>(pool.size());
    rep.stats.push_back(count);
    StatLine trades;
    trades.name = "trades_detected_path0";
    trades.empirical = static_cast<double>(events.size());
    rep.stats.push_back(trades);
    return rep;
}

inline RunReport run_analytics(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    RunReport rep;
    rep.config = c;
    fs::create_directories(c.output_dir);
    CsvWriter csv(c.output_dir + "/analytics_table.csv");
    csv.header("quantity,mu,lambda_or_x,y_or_eps,value,error_bound");
    auto row = [&](const std::string& q, double lx, double ye, double v, double eb) {
        csv.field(q).field(c.mu).field(lx).field(ye).field(v).field(eb).endrow();
    };
    for (double v : c.lambda_grid) {
        row("laplace_R_below", v, c.mu, laplace_R_below(v, c.mu, c.mu), 0.0);
        row("laplace_RI", v, c.mu, laplace_RI(v, c.mu), 0.0);
        row("laplace_RII", v, c.mu, laplace_RII(v, c.mu), 0.0);
        row("laplace_R", v, c.mu, laplace_R(v, c.mu), 0.0);
        row("laplace_RI_alt", v, c.mu, laplace_RI_alt(v, c.mu), 0.0);
        row("laplace_RII_alt", v, c.mu, laplace_RII_alt(v, c.mu), 0.0);
        {
            const auto t2 = theta(2, detail::PI * v / (2.0 * c.mu * c.mu), THETA_TOL);
            row("tail_R", v, c.mu, t2.value / (2.0 * c.mu), t2.tail_bound / (2.0 * c.mu));
        }
        row("tail_R_below", v, c.mu, tail_R_below(v, c.mu, c.mu), THETA_TOL);
        row("tail_R_typeII", v, c.mu, tail_R_typeII(v, c.mu), THETA_TOL);
        row("density_R", v, c.mu, density_R(v, c.mu), THETA_TOL);
        {
            double eb = 0.0;
            const double av = avalanche_laplace(v, c.eps, c.mu, 1e-10, &eb);
            row("avalanche_laplace", v, c.eps, av, eb);
        }
        row("dassios_wu_laplace", v, c.eps, dassios_wu_laplace(v, c.eps), 0.0);
    }
    return rep;
}

inline RunReport run_avalanche(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    RunReport rep;
    rep.config = c;
    fs::create_directories(c.output_dir);

    auto per_path = run_paths<std::vector<AvalancheRecord>>(
        static_cast<std::size_t>(c.n_paths), c.threads, [&](std::size_t i) {
            auto r = run_avalanche_path(c.seed, i, c.dt, c.horizon, c.mu, c.eps, {1}, false);
            return std::move(r.per_stride[0]);
        });
    std::vector<AvalancheRecord> records;
    for (auto& v : per_path) records.insert(records.end(), v.begin(), v.end());
    detail::write_avalanches_csv(c.output_dir + "/avalanches.csv", records);

    for (double lam : c.lambda_grid) {
        const std::string name = "avalanche_laplace(lambda=" + std::to_string(lam) + ")";
        const double ref = lam > 0.0 ? avalanche_laplace(lam, c.eps, c.mu) : 1.0;
        try {
            Estimate e = mc_laplace_avalanche(records, lam);
            rep.stats.push_back(detail::make_stat(name, e.value, e.se, ref));
        } catch (const insufficient_data& ex) {
            rep.stats.push_back(detail::make_insufficient(name, ex.what()));
        }
    }
    return rep;
}

inline RunReport run_typeI_compare(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    RunReport rep;
    rep.config = c;
    fs::create_directories(c.output_dir);

    auto per_path = run_paths<std::vector<AvalancheRecord>>(
        static_cast<std::size_t>(c.n_paths), c.threads, [&](std::size_t i) {
            auto r = run_avalanche_path(c.seed, i, c.dt, c.horizon, c.mu, c.eps, {1}, true);
            return std::move(r.per_stride[0]);
        });
    std::vector<AvalancheRecord> records;
    for (auto& v : per_path) records.insert(records.end(), v.begin(), v.end());
    detail::write_avalanches_csv(c.output_dir + "/avalanches_typeI.csv", records);

    for (double lam : c.lambda_grid) {
        const std::string name = "dassios_wu(lambda=" + std::to_string(lam) + ")";
        const double ref = lam > 0.0 ? dassios_wu_laplace(lam, c.eps) : 1.0;
        try {
            Estimate e = mc_laplace_avalanche(records, lam);
            rep.stats.push_back(detail::make_stat(name, e.value, e.se, ref));
        } catch (const insufficient_data& ex) {
            rep.stats.push_back(detail::make_insufficient(name, ex.what()));
        }
    }
    return rep;
}

inline RunReport run_compare(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    RunReport rep;
    rep.config = c;
    fs::create_directories(c.output_dir);

    const double y_cal = c.mu / 64.0;
    const std::size_t k_cal = 16;  // local-time budget 2*y_cal*k = mu/2
    const double ell = 2.0 * y_cal * static_cast<double>(k_cal);

    struct PathOut {
        ExcursionSample sample;
        std::optional<double> span;
    };
    auto per_path = run_paths<PathOut>(
        static_cast<std::size_t>(c.n_paths), c.threads, [&](std::size_t i) {
            PathOut o;
            o.sample = detail::path_excursions(c, i);
            o.span = local_time_clock_span(o.sample, y_cal, k_cal);
            return o;
        });

    ExcursionSample pool;
    pool.mu = c.mu;
    pool.dt = c.dt;
    pool.seed = c.seed;
    for (const auto& p : per_path)
        pool.excursions.insert(pool.excursions.end(), p.sample.excursions.begin(),
                               p.sample.excursions.end());
    detail::write_excursions_csv(c.output_dir + "/excursions.csv", pool.excursions);

    // height law ratio: count(H >= mu/2) / count(H >= mu/4) -> 1/2
    {
        double n1 = 0, n2 = 0;
        for (const auto& e : pool.excursions) {
            if (e.H >= c.mu / 4.0) ++n1;
            if (e.H >= c.mu / 2.0) ++n2;
        }
        if (n1 >= 100) {
            const double p = n2 / n1;
            const double se = std::sqrt(p * (1.0 - p) / n1);
            rep.stats.push_back(detail::make_stat("height_ratio(mu/2|mu/4)", p, se, 0.5));
        } else {
            rep.stats.push_back(detail::make_insufficient("height_ratio(mu/2|mu/4)",
                                                          "need 100 excursions with H>=mu/4"));
        }
    }

    // conditional law of R given H = mu against the theta tail
    for (double xf : {0.05, 0.2, 0.5, 1.0, 2.0}) {
        const double x = xf * c.mu * c.mu;
        const std::string name = "tail_R_given_Hmu(x=" + std::to_string(x) + ")";
        try {
            Estimate e = conditional_tail_R(pool, c.mu, x);
            const double ref = 2.0 * c.mu * tail_R_typeII(x, c.mu);
            rep.stats.push_back(detail::make_stat(name, e.value, e.se, ref));
        } catch (const insufficient_data& ex) {
            rep.stats.push_back(detail::make_insufficient(name, ex.what()));
        }
    }

    // calibrated exponential formula: E exp(-lambda * time of 2*y*k local units)
    for (double lam : c.lambda_grid) {
        MeanAcc acc;
        for (const auto& p : per_path)
            if (p.span) acc.add(std::exp(-lam * *p.span));
        const std::string name = "exponential_formula(lambda=" + std::to_string(lam) + ")";
        if (acc.n >= 50) {
            const double ref = std::exp(-ell * laplace_R(lam, c.mu));
            rep.stats.push_back(detail::make_stat(name, acc.mean, acc.se(), ref));
        } else {
            rep.stats.push_back(detail::make_insufficient(name, "too few completed clocks"));
        }
    }

    // local time calibration consistency at two heights
    try {
        Estimate l1 = estimate_local_time_unit(pool, c.mu / 4.0);
        Estimate l2 = estimate_local_time_unit(pool, c.mu / 2.0);
        const double ratio = l1.value / l2.value;
        const double se = ratio * std::sqrt(1.0 / static_cast<double>(l1.n) +
                                            1.0 / static_cast<double>(l2.n));
        rep.stats.push_back(detail::make_stat("local_time_ratio(mu/4:mu/2)", ratio, se, 1.0));
    } catch (const insufficient_data& ex) {
        rep.stats.push_back(detail::make_insufficient("local_time_ratio(mu/4:mu/2)", ex.what()));
    }
    return rep;
}

// Executes the configured mode, writes report.json, and returns the report
// with the process exit code: 0 ok, 1 config error (thrown as
// invalid_argument before anything runs), 2 numeric failure, 3 statistical
// rejection (some |z| > 4).
inline std::pair<RunReport, int> run(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    int code = 0;
    try {
        switch (config.mode) {
            case Mode::simulate: rep = run_simulate(config); break;
            case Mode::analytics: rep = run_analytics(config); break;
            case Mode::avalanche: rep = run_avalanche(config); break;
            case Mode::compare: rep = run_compare(config); break;
            case Mode::typeI_compare: rep = run_typeI_compare(config); break;
        }
    } catch (const numeric_error&) {
        throw;  // caller maps to exit code 2 with context
    }
    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const bool comparing = config.mode == Mode::avalanche || config.mode == Mode::compare ||
                           config.mode == Mode::typeI_compare;
    if (comparing && !rep.all_within(4.0)) code = 3;
    rep.write(config.output_dir + "/report.json");
    return {rep, code};
}

} // namespace lobx
