#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lobx {

enum class Mode { simulate, analytics, avalanche, compare, typeI_compare };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::simulate: return "simulate";
        case Mode::analytics: return "analytics";
        case Mode::avalanche: return "avalanche";
        case Mode::compare: return "compare";
        case Mode::typeI_compare: return "typeI_compare";
    }
    return "?";
}

// Flat, typed experiment configuration. Precedence: built-in defaults, then
// the config file, then command-line flags.
struct ExperimentConfig {
    double mu = 1.0;
    double dt = 1e-4;
    double horizon = 100.0;
    double eps = 0.05;
    double dx = 0.01;
    double eps_acc = 0.0;  // 0: resolved to 10*dt
    std::vector<double> lambda_grid = {0.1, 1.0, 10.0};
    long long n_paths = 100;
    std::uint64_t seed = 1;
    double tol_levels = 1.0;
    unsigned threads = 0;  // 0: all available cores
    std::string output_dir = "out";
    Mode mode = Mode::simulate;

    double resolved_eps_acc() const { return eps_acc > 0.0 ? eps_acc : 10.0 * dt; }

    void validate() const {
        auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
        if (!(mu > 0.0)) fail("mu must be > 0");
        if (!(dt > 0.0)) fail("dt must be > 0");
        if (!(horizon >= dt)) fail("horizon must be >= dt");
        if (!(dx > 0.0)) fail("dx must be > 0");
        if (!(tol_levels >= 0.0)) fail("tol_levels must be >= 0");
        if (eps_acc != 0.0 && !(eps_acc >= dt)) fail("eps_acc must be >= dt");
        const bool needs_paths = mode != Mode::analytics;
        if (needs_paths && n_paths < 1) fail("n_paths must be >= 1 in mode " + std::string(to_string(mode)));
        const bool laplace_mode =
            mode == Mode::avalanche || mode == Mode::compare || mode == Mode::typeI_compare ||
            mode == Mode::analytics;
        if (laplace_mode && lambda_grid.empty()) fail("lambda_grid must be non-empty");
        for (double l : lambda_grid)
            if (!(l >= 0.0)) fail("lambda_grid entries must be >= 0");
        const bool avalanche_mode = mode == Mode::avalanche || mode == Mode::typeI_compare;
        if (avalanche_mode && !(eps >= 100.0 * dt))
            fail("eps must be >= 100*dt in avalanche modes (detection noise dominates below)");
        if (!(eps > 0.0)) fail("eps must be > 0");
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed numeric value for key '" + key + "': " + v);
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed integer value for key '" + key + "': " + v);
    }
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for key '" + key + "'");
    return out;
}

} // namespace detail

// Applies one key=value assignment; unknown keys are rejected.
inline void config_set(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "mu") c.mu = detail::parse_double(key, value);
    else if (key == "dt") c.dt = detail::parse_double(key, value);
    else if (key == "horizon") c.horizon = detail::parse_double(key, value);
    else if (key == "eps") c.eps = detail::parse_double(key, value);
    else if (key == "dx") c.dx = detail::parse_double(key, value);
    else if (key == "eps_acc") c.eps_acc = detail::parse_double(key, value);
    else if (key == "lambda_grid") c.lambda_grid = detail::parse_double_list(key, value);
    else if (key == "n_paths") c.n_paths = detail::parse_int(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::parse_int(key, value));
    else if (key == "tol_levels") c.tol_levels = detail::parse_double(key, value);
    else if (key == "threads") c.threads = static_cast<unsigned>(detail::parse_int(key, value));
    else if (key == "output_dir") c.output_dir = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

// key = value lines; '#' starts a comment; blank lines ignored.
inline ExperimentConfig parse_config_file(const std::string& path,
                                          ExperimentConfig base = ExperimentConfig{}) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not a key=value assignment: " + t);
        config_set(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return base;
}

} // namespace lobx
