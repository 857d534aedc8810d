#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace lobx {

// Running mean/variance (Welford) with an associative merge, so per-path
// statistics can be reduced in a fixed order regardless of thread count.
struct MeanAcc {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    void merge(const MeanAcc& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double nn = static_cast<double>(n), on = static_cast<double>(o.n);
        const double d = o.mean - mean;
        mean += d * on / (nn + on);
        m2 += o.m2 + d * d * nn * on / (nn + on);
        n += o.n;
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double se() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

inline double z_score(double empirical, double se, double reference) {
    if (!(se > 0.0)) return empirical == reference ? 0.0 : std::copysign(1e300, empirical - reference);
    return (empirical - reference) / se;
}

// Runs fn(path_index) for path_index in [0, n_paths) on `threads` workers and
// collects the results indexed by path, so any reduction over them is
// bitwise independent of the scheduling.
template <class R>
inline std::vector<R> run_paths(std::size_t n_paths, unsigned threads,
                                const std::function<R(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<R> results(n_paths);
    if (threads == 1 || n_paths <= 1) {
        for (std::size_t i = 0; i < n_paths; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_paths) return;
            results[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

} // namespace lobx
