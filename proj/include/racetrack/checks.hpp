#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "racetrack/dynamics.hpp"
#include "racetrack/equilibrium.hpp"
#include "racetrack/population.hpp"
#include "racetrack/spectral.hpp"

namespace racetrack {

/// |x - y| / max(|x|, |y|); zero when both vanish.
inline double relative_error(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< worst observed error
    double tolerance = 0.0;
};

/// Random population over R regions summing to Lambda (uniform weights, normalised).
inline PopulationState random_population(const ModelParams& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    PopulationState s{std::vector<double>(static_cast<std::size_t>(p.R)), 0.0};
    for (auto& l : s.lambda) l = u(rng);
    detail::rescale_to_total(s.lambda, p.Lambda);
    return s;
}

/// Worst residuals of the equilibrium identities on one population.
struct EquilibriumResiduals {
    double zero_profit = 0.0;    ///< max |Pi_x| / (F max|w|)
    double demand_forms = 0.0;   ///< max |q - q_primitive| / max|q|
    double rotation = 0.0;       ///< max over prices, wages, real wages
};

namespace detail {
inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}
}  // namespace detail

inline EquilibriumResiduals equilibrium_residuals(const PopulationState& lambda, const ModelParams& p) {
    EquilibriumResiduals r;
    const auto snap = solve_equilibrium(lambda, p);
    // Profits use the primitive demand form so the identity is not a restatement of the wage rule.
    const auto q2 = primitive_demand(snap.prices, p, lambda);
    const auto pi = profits(snap.prices, q2, snap.wages, lambda, p);
    r.zero_profit = detail::max_abs(pi) / (p.F * std::max(detail::max_abs(snap.wages.values), 1e-300));

    double diff = 0.0;
    for (int x = 0; x < p.R; ++x)
        for (int y = 0; y < p.R; ++y) diff = std::max(diff, std::abs(snap.demand(x, y) - q2(x, y)));
    r.demand_forms = diff / std::max(detail::max_abs(snap.demand.data()), 1e-300);

    const auto rot = solve_equilibrium(rotated(lambda, 1), p);
    const int R = p.R;
    double worst = 0.0;
    auto rel = [&](double a, double b, double scale) { worst = std::max(worst, std::abs(a - b) / scale); };
    const double p_scale = detail::max_abs(snap.prices.data());
    const double w_scale = std::max(detail::max_abs(snap.wages.values), 1e-300);
    const double o_scale = std::max(detail::max_abs(snap.real_wages.values), 1e-300);
    for (int x = 0; x < R; ++x) {
        const int xs = (x + 1) % R;
        for (int y = 0; y < R; ++y) rel(rot.prices(xs, (y + 1) % R), snap.prices(x, y), p_scale);
        rel(rot.wages.values[static_cast<std::size_t>(xs)], snap.wages.values[static_cast<std::size_t>(x)], w_scale);
        rel(rot.real_wages.values[static_cast<std::size_t>(xs)], snap.real_wages.values[static_cast<std::size_t>(x)], o_scale);
    }
    r.rotation = worst;
    return r;
}

/// Max relative deviation of solve_prices at the homogeneous state from Theta + (tau/2)|x - y|.
inline double homogeneous_price_error(const ModelParams& p) {
    const auto prices = solve_prices(homogeneous_state(p), p);
    const auto profile = stationary_profile(p);
    double worst = 0.0;
    for (int x = 0; x < p.R; ++x)
        for (int y = 0; y < p.R; ++y)
            worst = std::max(worst, relative_error(prices(x, y), profile.p_bar[static_cast<std::size_t>(ring_offset(x, y, p.R))]));
    return worst;
}

/// Tolerances shared by `validate` and the acceptance suite.
struct Tolerances {
    double closed_form = 1e-9;
    double fd = 1e-5;
    double equilibrium = 1e-10;
    double homogeneous = 1e-12;
    double rotation = 1e-12;
    double conservation = 1e-7;
};

/// Closed form vs. Fourier pipeline (R <= 4 only) and Fourier pipeline vs. FD Jacobian
/// eigenvalues, for every mode at the given tau values.
inline std::vector<CheckResult> spectral_checks(const ModelParams& base, const std::vector<double>& taus,
                                                const Tolerances& tol = {}) {
    double worst_cf = 0.0, worst_fd = 0.0, worst_circ = 0.0;
    for (double t : taus) {
        const auto p = base.with_tau(t);
        const auto fd = jacobian_fd(p);
        worst_circ = std::max(worst_circ, fd.circulant_residual);
        const double scale = p.v * p.mean_mobile();
        for (int k = 1; k < p.R; ++k) {
            const double om = omega_numeric(p, k);
            if (has_closed_form(p.R)) worst_cf = std::max(worst_cf, relative_error(closed_form_omega(p, k), om));
            worst_fd = std::max(worst_fd, relative_error(scale * om, fd.eigenvalues[static_cast<std::size_t>(k)]));
        }
    }
    std::vector<CheckResult> out;
    if (has_closed_form(base.R))
        out.push_back({"closed-form vs Fourier pipeline", worst_cf <= tol.closed_form, worst_cf, tol.closed_form});
    out.push_back({"Fourier pipeline vs FD Jacobian", worst_fd <= tol.fd, worst_fd, tol.fd});
    out.push_back({"FD Jacobian circulant", worst_circ <= circulant_tol, worst_circ, circulant_tol});
    return out;
}

inline std::vector<CheckResult> equilibrium_checks(const ModelParams& p, int samples, std::uint64_t seed,
                                                   const Tolerances& tol = {}) {
    std::mt19937_64 rng(seed);
    EquilibriumResiduals worst;
    for (int i = 0; i < samples; ++i) {
        const auto r = equilibrium_residuals(random_population(p, rng), p);
        worst.zero_profit = std::max(worst.zero_profit, r.zero_profit);
        worst.demand_forms = std::max(worst.demand_forms, r.demand_forms);
        worst.rotation = std::max(worst.rotation, r.rotation);
    }
    const double homog = homogeneous_price_error(p);
    return {
        {"zero-profit identity", worst.zero_profit <= tol.equilibrium, worst.zero_profit, tol.equilibrium},
        {"demand-form equivalence", worst.demand_forms <= tol.equilibrium, worst.demand_forms, tol.equilibrium},
        {"homogeneous prices match stationary profile", homog <= tol.homogeneous, homog, tol.homogeneous},
        {"rotation equivariance", worst.rotation <= tol.rotation, worst.rotation, tol.rotation},
    };
}

/// Integrates a perturbed state without clamping and reports the worst |sum(lambda) - Lambda| / Lambda.
inline CheckResult conservation_check(const ModelParams& p, double t_end, double dt, double eps,
                                      std::uint64_t seed, const Tolerances& tol = {}) {
    IntegrateOptions opts;
    opts.clamp_and_rescale = false;
    opts.stationary_tol = 0.0;
    opts.sample_stride = 100;
    const auto traj = integrate(random_perturbation(p, eps, seed), p, t_end, dt, opts);
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, s.residual / p.Lambda);
    return {"population conservation", worst <= tol.conservation, worst, tol.conservation};
}

}  // namespace racetrack
