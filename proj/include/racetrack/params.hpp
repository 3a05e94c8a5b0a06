#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace racetrack {

/// Structural parameters of the racetrack economy.
///
/// Field names double as the JSON keys of a flat parameter object.
struct ModelParams {
    double a = 1.0;       ///< demand intercept
    double b = 1.0;       ///< own-price sensitivity
    double c = 1.0;       ///< substitutability between varieties
    double F = 1.0;       ///< fixed mobile-labour input per firm
    double tau = 1.0;     ///< transport cost per unit arc length
    double v = 1.0;       ///< migration adjustment speed
    double Phi = 1.0;     ///< total immobile population
    double Lambda = 1.0;  ///< total mobile population
    int R = 2;            ///< number of regions on the ring

    /// Number of firms (varieties) in the whole economy, n = Lambda / F.
    double firms() const { return Lambda / F; }
    double mean_mobile() const { return Lambda / R; }
    double mean_immobile() const { return Phi / R; }
    /// b + c n, the slope shared by the pricing and demand rules.
    double demand_slope() const { return b + c * firms(); }
    /// 2bF + c Lambda; recurs in every closed-form expression.
    double price_scale() const { return 2.0 * b * F + c * Lambda; }

    ModelParams with_tau(double t) const {
        ModelParams p = *this;
        p.tau = t;
        return p;
    }
    ModelParams with_regions(int regions) const {
        ModelParams p = *this;
        p.R = regions;
        return p;
    }

    bool operator==(const ModelParams&) const = default;
};

enum class ValidationMode {
    strict,
    /// Accepts c = 0 (decoupled demand). Test use only.
    allow_decoupled_demand,
};

/// Thrown by validate_params; carries every violated bound, not just the first.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid model parameters:";
        for (const auto& s : v) out += " " + s + ";";
        return out;
    }
    std::vector<std::string> violations_;
};

inline std::vector<std::string> collect_violations(const ModelParams& p,
                                                   ValidationMode mode = ValidationMode::strict) {
    std::vector<std::string> out;
    auto positive = [&](double value, const char* name) {
        if (!std::isfinite(value))
            out.push_back(std::string(name) + " must be finite");
        else if (!(value > 0.0))
            out.push_back(std::string(name) + " must be > 0");
    };
    auto nonnegative = [&](double value, const char* name) {
        if (!std::isfinite(value))
            out.push_back(std::string(name) + " must be finite");
        else if (!(value >= 0.0))
            out.push_back(std::string(name) + " must be >= 0");
    };

    positive(p.a, "a");
    positive(p.b, "b");
    if (mode == ValidationMode::allow_decoupled_demand)
        nonnegative(p.c, "c");
    else
        positive(p.c, "c");
    positive(p.F, "F");
    nonnegative(p.tau, "tau");
    positive(p.v, "v");
    nonnegative(p.Phi, "Phi");
    positive(p.Lambda, "Lambda");
    if (p.R < 2) out.push_back("R must be >= 2");

    if (out.empty()) {
        if (!std::isfinite(p.firms()) || !std::isfinite(p.mean_mobile()) ||
            !std::isfinite(p.mean_immobile()))
            out.push_back("derived quantities n, lambda_bar, phi_bar must be finite");
    }
    return out;
}

inline const ModelParams& validate_params(const ModelParams& p,
                                          ValidationMode mode = ValidationMode::strict) {
    auto violations = collect_violations(p, mode);
    if (!violations.empty()) throw ParameterError(std::move(violations));
    return p;
}

}  // namespace racetrack
