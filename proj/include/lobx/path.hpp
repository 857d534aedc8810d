#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lobx {

enum class PathKind { brownian, reflected, best_ask, best_bid };

inline const char* to_string(PathKind k) {
    switch (k) {
        case PathKind::brownian: return "brownian";
        case PathKind::reflected: return "reflected";
        case PathKind::best_ask: return "best_ask";
        case PathKind::best_bid: return "best_bid";
    }
    return "?";
}

// A trajectory sampled on the uniform grid 0, dt, 2dt, ..., n*dt, together
// with its seed provenance. Immutable by convention after construction.
struct Path {
    double dt = 0.0;
    std::vector<double> values;
    std::uint64_t seed = 0;
    PathKind kind = PathKind::brownian;

    std::size_t size() const { return values.size(); }
    double horizon() const { return dt * static_cast<double>(values.size() - 1); }
    double time_at(std::size_t i) const { return dt * static_cast<double>(i); }
};

// Displacement and starting point for folding a Brownian path into [0, mu].
// x0 defaults to mu: the gap process best_ask - W starts at the full
// displacement when the book opens empty.
struct FoldSpec {
    double mu = 1.0;
    double x0 = 1.0;

    void validate() const {
        if (!(mu > 0.0))
            throw std::invalid_argument("FoldSpec: mu must be > 0, got " + std::to_string(mu));
        if (!(x0 >= 0.0 && x0 <= mu))
            throw std::invalid_argument("FoldSpec: x0 must lie in [0, mu]");
    }
};

} // namespace lobx
