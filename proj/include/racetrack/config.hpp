#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "racetrack/json_io.hpp"
#include "racetrack/params.hpp"

namespace racetrack {

/// Everything a CLI run needs: model parameters plus per-command options.
struct RunConfig {
    ModelParams params;
    double t_end = 100.0;
    double dt = 1e-3;
    int mode = 1;         ///< Fourier mode to seed; 0 seeds a random zero-sum perturbation
    double eps = 1e-4;    ///< perturbation amplitude
    double tau_min = 0.05;
    double tau_max = 5.0;
    int steps = 100;
    int sample_stride = 10;
    std::uint64_t seed = 0;
    std::string out = ".";

    bool operator==(const RunConfig&) const = default;
};

inline std::vector<std::string> config_violations(const RunConfig& c) {
    auto out = collect_violations(c.params);
    if (!(c.tau_min < c.tau_max)) out.push_back("tau_min must be < tau_max");
    if (c.tau_min < 0.0) out.push_back("tau_min must be >= 0");
    if (c.steps < 2) out.push_back("steps must be >= 2");
    if (!(c.eps >= 0.0)) out.push_back("eps must be >= 0");
    if (!(c.dt > 0.0)) out.push_back("dt must be > 0");
    if (!(c.t_end > 0.0)) out.push_back("t_end must be > 0");
    if (c.sample_stride < 1) out.push_back("sample_stride must be >= 1");
    if (c.mode < 0 || c.mode >= c.params.R) out.push_back("mode must lie in [0, R-1]");
    return out;
}

inline Json to_json(const RunConfig& c) {
    return Json{{"params", to_json(c.params)},
                {"t_end", c.t_end},
                {"dt", c.dt},
                {"mode", c.mode},
                {"eps", c.eps},
                {"tau_min", c.tau_min},
                {"tau_max", c.tau_max},
                {"steps", c.steps},
                {"sample_stride", c.sample_stride},
                {"seed", c.seed},
                {"out", c.out}};
}

/// Accepts either a run config ({"params": {...}, options...}) or a bare flat
/// parameter object. Options omitted from a run config keep their defaults.
inline RunConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    if (!j.contains("params")) {
        c.params = params_from_json(j);
        return c;
    }
    for (const auto& [key, value] : j.items()) {
        auto num = [&] {
            if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
            return value.get<double>();
        };
        auto integer = [&] {
            if (!value.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
            return value.get<long long>();
        };
        if (key == "params") c.params = params_from_json(value);
        else if (key == "t_end") c.t_end = num();
        else if (key == "dt") c.dt = num();
        else if (key == "mode") c.mode = static_cast<int>(integer());
        else if (key == "eps") c.eps = num();
        else if (key == "tau_min") c.tau_min = num();
        else if (key == "tau_max") c.tau_max = num();
        else if (key == "steps") c.steps = static_cast<int>(integer());
        else if (key == "sample_stride") c.sample_stride = static_cast<int>(integer());
        else if (key == "seed") {
            if (!value.is_number_unsigned()) throw ConfigError("config key 'seed' must be a non-negative integer");
            c.seed = value.get<std::uint64_t>();
        } else if (key == "out") {
            if (!value.is_string()) throw ConfigError("config key 'out' must be a string");
            c.out = value.get<std::string>();
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return c;
}

}  // namespace racetrack
