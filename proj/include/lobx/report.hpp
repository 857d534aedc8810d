#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lobx/config.hpp"

namespace lobx {

// One compared statistic: empirical estimate with its standard error against
// the closed-form reference, plus the z-score.
struct StatLine {
    std::string name;
    double empirical = 0.0;
    double se = 0.0;
    double reference = 0.0;
    double z = 0.0;
    bool insufficient = false;
    std::string note;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<StatLine> stats;
    double wall_ms = 0.0;
    std::string rng_name = "splitmix64-counter";

    bool all_within(double z_max) const {
        for (const auto& s : stats)
            if (!s.insufficient && std::abs(s.z) > z_max) return false;
        return true;
    }
    bool any_insufficient() const {
        for (const auto& s : stats)
            if (s.insufficient) return true;
        return false;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["config"] = {
            {"mode", to_string(config.mode)},
            {"mu", config.mu},
            {"dt", config.dt},
            {"horizon", config.horizon},
            {"eps", config.eps},
            {"dx", config.dx},
            {"eps_acc", config.resolved_eps_acc()},
            {"lambda_grid", config.lambda_grid},
            {"n_paths", config.n_paths},
            {"seed", config.seed},
            {"tol_levels", config.tol_levels},
            {"threads", config.threads},
            {"output_dir", config.output_dir},
        };
        j["rng"] = rng_name;
        j["wall_ms"] = wall_ms;
        j["statistics"] = nlohmann::json::array();
        for (const auto& s : stats) {
            nlohmann::json js = {
                {"name", s.name},  {"empirical", s.empirical}, {"se", s.se},
                {"reference", s.reference}, {"z", s.z},
            };
            if (s.insufficient) js["insufficient_data"] = true;
            if (!s.note.empty()) js["note"] = s.note;
            j["statistics"].push_back(js);
        }
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        out << to_json().dump(2) << "\n";
    }
};

} // namespace lobx
