#pragma once

#include <cmath>
#include <cstdint>

namespace lobx {

namespace detail {

// SplitMix64 finalizer (Stafford mix13). Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t GOLDEN = 0x9e3779b97f4a7c15ULL;

} // namespace detail

// Counter-based generator: output(i) = mix64(key + i*GOLDEN), i.e. SplitMix64
// with random access. Streams for distinct (seed, path, tag) triples are
// derived by chained mixing, so path-parallel runs are reproducible
// independently of scheduling.
class CounterRng {
public:
    CounterRng() = default;
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    // Derives an independent stream. `tag` separates consumers that walk the
    // same path (increments, thinning, height sampling, ...) so that enabling
    // one never perturbs another.
    static CounterRng stream(std::uint64_t seed, std::uint64_t path_index,
                             std::uint64_t tag = 0) {
        std::uint64_t k = detail::mix64(seed + detail::GOLDEN);
        k = detail::mix64(k ^ (path_index + detail::GOLDEN));
        k = detail::mix64(k ^ (tag + detail::GOLDEN));
        return CounterRng(k);
    }

    std::uint64_t next_u64() noexcept {
        return detail::mix64(key_ + (++ctr_) * detail::GOLDEN);
    }

    // Uniform on (0,1]; never returns 0, so log() is always safe.
    double next_uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the pair's second value is cached.
    // Implemented explicitly (not std::normal_distribution) so that the
    // sample stream is identical across standard libraries.
    double next_gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) noexcept { return next_uniform() <= p; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags used across the library. Keeping them in one place guarantees
// that detectors never consume from the path-increment stream.
namespace rng_tag {
inline constexpr std::uint64_t increments = 1;
inline constexpr std::uint64_t zero_thinning = 2;
inline constexpr std::uint64_t height_sampling = 3;
inline constexpr std::uint64_t trade_thinning = 4;
inline constexpr std::uint64_t tau_thinning = 5;
inline constexpr std::uint64_t renewal = 6;
} // namespace rng_tag

} // namespace lobx
