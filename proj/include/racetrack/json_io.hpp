#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "racetrack/dynamics.hpp"
#include "racetrack/equilibrium.hpp"
#include "racetrack/params.hpp"
#include "racetrack/spectral.hpp"

namespace racetrack {

using Json = nlohmann::ordered_json;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::array<std::string_view, 9> param_keys = {"a", "b", "c", "F", "tau", "v", "Phi", "Lambda", "R"};

inline Json to_json(const ModelParams& p) {
    return Json{{"a", p.a},     {"b", p.b},     {"c", p.c},           {"F", p.F}, {"tau", p.tau},
                {"v", p.v},     {"Phi", p.Phi}, {"Lambda", p.Lambda}, {"R", p.R}};
}

/// Parses a flat parameter object. Every key must be present; unknown keys are rejected.
inline ModelParams params_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("parameters must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto k : param_keys) known = known || key == k;
        if (!known) throw ConfigError("unknown parameter key '" + key + "'");
    }
    auto number = [&](const char* key) {
        if (!j.contains(key)) throw ConfigError(std::string("missing parameter '") + key + "'");
        const auto& v = j.at(key);
        if (!v.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
        return v.get<double>();
    };
    ModelParams p;
    p.a = number("a");
    p.b = number("b");
    p.c = number("c");
    p.F = number("F");
    p.tau = number("tau");
    p.v = number("v");
    p.Phi = number("Phi");
    p.Lambda = number("Lambda");
    if (!j.contains("R")) throw ConfigError("missing parameter 'R'");
    if (!j.at("R").is_number_integer()) throw ConfigError("parameter 'R' must be an integer");
    p.R = j.at("R").get<int>();
    return p;
}

namespace detail {
inline Json matrix_rows(const SquareMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (double v : m.row(i)) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}
inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
}  // namespace detail

/// Matrices are row-major lists of rows: prices[x][y] is the price in destination y
/// of the variety made in origin x.
inline Json to_json(const EquilibriumSnapshot& s) {
    Json warnings = Json::array();
    for (const auto& w : s.warnings)
        warnings.push_back({{"origin", w.origin}, {"destination", w.destination}, {"demand", w.value}});
    return Json{{"layout", "row-major, [origin][destination]"},
                {"prices", detail::matrix_rows(s.prices)},
                {"demand", detail::matrix_rows(s.demand)},
                {"wages", s.wages.values},
                {"real_wages", s.real_wages.values},
                {"avg_real_wage", s.avg_real_wage},
                {"negative_demand", warnings}};
}

inline Json to_json(const SpectralReport& r) {
    Json modes = Json::array();
    for (std::size_t i = 0; i < r.omega_modes.size(); ++i)
        modes.push_back({{"k", i + 1}, {"omega", r.omega_modes[i]}, {"critical_tau", detail::optional_number(r.critical_tau[i])}});
    Json quad = nullptr;
    if (r.quad_coeffs)
        quad = Json{{"A", r.quad_coeffs->A}, {"B", r.quad_coeffs->B}, {"C", detail::optional_number(r.quad_coeffs->C)}};
    return Json{{"R", r.R},
                {"tau", r.tau},
                {"modes", modes},
                {"quad_coeffs", quad},
                {"classification", to_string(r.classification)}};
}

inline Json to_json(const SignSampleReport& r) {
    Json failures = Json::array();
    for (const auto& f : r.failures) failures.push_back({{"which", f.which}, {"params", to_json(f.params)}});
    return Json{{"draws", r.draws}, {"failures", failures}};
}

}  // namespace racetrack
