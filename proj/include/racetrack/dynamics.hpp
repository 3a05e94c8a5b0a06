#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "racetrack/equilibrium.hpp"
#include "racetrack/fourier.hpp"
#include "racetrack/params.hpp"
#include "racetrack/population.hpp"

namespace racetrack {

namespace detail {

struct RhsEval {
    std::vector<double> rate;
    RealWageVector omega;
    double avg = 0.0;
};

inline RhsEval migration_rhs(std::span<const double> lambda, const ModelParams& p) {
    const auto prices = solve_prices(lambda, p);
    const auto wages = nominal_wages(prices, lambda, p);
    RhsEval out;
    out.omega = real_wages(wages, prices, lambda, p);
    out.avg = average_real_wage(out.omega, lambda, p);
    out.rate.resize(lambda.size());
    for (std::size_t x = 0; x < lambda.size(); ++x)
        out.rate[x] = p.v * (out.omega.values[x] - out.avg) * lambda[x];
    return out;
}

}  // namespace detail

/// d lambda_x / dt = v (omega_x - omega_tilde) lambda_x.
inline std::vector<double> migration_rhs(const PopulationState& lambda, const ModelParams& p) {
    check_population(lambda, p);
    return detail::migration_rhs(lambda.lambda, p).rate;
}

enum class TerminalReason { reached_t_end, converged_to_stationary, blow_up_guard };

inline const char* to_string(TerminalReason r) {
    switch (r) {
        case TerminalReason::reached_t_end: return "reached_t_end";
        case TerminalReason::converged_to_stationary: return "converged_to_stationary";
        case TerminalReason::blow_up_guard: return "blow_up_guard";
    }
    return "unknown";
}

struct IntegrateOptions {
    /// Stop when max|rhs| falls below this. Unset means 1e-12 * v * Lambda.
    std::optional<double> stationary_tol;
    double blow_up_factor = 10.0;
    /// Clamp negative overshoot to zero and rescale to sum Lambda after a step.
    bool clamp_and_rescale = true;
    /// Record every n-th step; the initial and final states are always recorded.
    int sample_stride = 1;
    /// Reject dt when dt * v * max|omega - omega_tilde| > 0.5 at t = 0.
    bool check_step_size = true;
};

struct TrajectorySample {
    double time = 0.0;
    std::vector<double> lambda;
    std::vector<double> real_wages;
    double residual = 0.0;  ///< |sum(lambda) - Lambda|
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TerminalReason terminal_reason = TerminalReason::reached_t_end;
    int clamp_events = 0;
    int steps = 0;
};

class StepSizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fixed-step classical RK4 on the migration ODE.
inline Trajectory integrate(const PopulationState& lambda0, const ModelParams& p, double t_end, double dt,
                            const IntegrateOptions& opts = {}) {
    validate_params(p);
    check_population(lambda0, p);
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be > 0");
    if (opts.sample_stride < 1) throw std::invalid_argument("integrate: sample_stride must be >= 1");

    const double stationary_tol = opts.stationary_tol.value_or(1e-12 * p.v * p.Lambda);
    const std::size_t R = lambda0.lambda.size();

    Trajectory traj;
    std::vector<double> lambda = lambda0.lambda;
    double t = lambda0.time;
    const double t_stop = lambda0.time + t_end;

    auto record = [&](const detail::RhsEval& eval) {
        double total = 0.0;
        for (double l : lambda) total += l;
        traj.samples.push_back({t, lambda, eval.omega.values, std::abs(total - p.Lambda)});
    };
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };

    auto k1 = detail::migration_rhs(lambda, p);
    if (opts.check_step_size) {
        double spread = 0.0;
        for (double w : k1.omega.values) spread = std::max(spread, std::abs(w - k1.avg));
        if (dt * p.v * spread > 0.5)
            throw StepSizeError("integrate: dt * v * max|omega - omega_tilde| = " +
                                std::to_string(dt * p.v * spread) + " > 0.5; reduce dt");
    }
    record(k1);

    const auto total_steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
    std::vector<double> stage(R);
    for (long long step = 0;; ++step) {
        if (max_abs(k1.rate) < stationary_tol) {
            traj.terminal_reason = TerminalReason::converged_to_stationary;
            if (traj.samples.back().time != t) record(k1);
            return traj;
        }
        if (step >= total_steps) {
            traj.terminal_reason = TerminalReason::reached_t_end;
            if (traj.samples.back().time != t) record(k1);
            return traj;
        }

        const double h = std::min(dt, t_stop - t);
        for (std::size_t i = 0; i < R; ++i) stage[i] = lambda[i] + 0.5 * h * k1.rate[i];
        const auto k2 = detail::migration_rhs(stage, p);
        for (std::size_t i = 0; i < R; ++i) stage[i] = lambda[i] + 0.5 * h * k2.rate[i];
        const auto k3 = detail::migration_rhs(stage, p);
        for (std::size_t i = 0; i < R; ++i) stage[i] = lambda[i] + h * k3.rate[i];
        const auto k4 = detail::migration_rhs(stage, p);
        for (std::size_t i = 0; i < R; ++i)
            lambda[i] += h / 6.0 * (k1.rate[i] + 2.0 * k2.rate[i] + 2.0 * k3.rate[i] + k4.rate[i]);
        t = step + 1 == total_steps ? t_stop : lambda0.time + static_cast<double>(step + 1) * dt;
        ++traj.steps;

        if (opts.clamp_and_rescale && std::any_of(lambda.begin(), lambda.end(), [](double l) { return l < 0.0; })) {
            for (auto& l : lambda) l = std::max(l, 0.0);
            detail::rescale_to_total(lambda, p.Lambda);
            ++traj.clamp_events;
        }

        const bool blown = std::any_of(lambda.begin(), lambda.end(), [&](double l) {
            return !std::isfinite(l) || l > opts.blow_up_factor * p.Lambda;
        });
        if (blown) {
            traj.terminal_reason = TerminalReason::blow_up_guard;
            double total = 0.0;
            for (double l : lambda) total += l;
            traj.samples.push_back({t, lambda, {}, std::abs(total - p.Lambda)});
            return traj;
        }

        k1 = detail::migration_rhs(lambda, p);
        if ((step + 1) % opts.sample_stride == 0) record(k1);
    }
}

/// Fourier coefficients lambda_hat_k of a population (1/R normalisation).
inline std::vector<Complex> mode_amplitudes(const PopulationState& state) { return dft(state.lambda); }

struct GrowthFit {
    double rate = 0.0;  ///< d log|lambda_hat_k| / dt
    int points = 0;
};

/// Least-squares slope of log|lambda_hat_k(t)| over samples with floor <= |lambda_hat_k| <= 10 eps.
///
/// `floor` excludes the round-off regime of strongly decaying modes; it defaults to 1e-4 eps.
inline std::optional<GrowthFit> fit_growth_rate(const Trajectory& traj, int mode, double eps,
                                                std::optional<double> floor = std::nullopt) {
    if (!(eps > 0.0)) return std::nullopt;
    const double lo = floor.value_or(1e-4 * eps);
    const double hi = 10.0 * eps;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (const auto& s : traj.samples) {
        if (s.real_wages.empty()) continue;
        const double amp = std::abs(dft(s.lambda)[static_cast<std::size_t>(mode)]);
        if (amp > hi) break;
        if (amp < lo) continue;
        const double y = std::log(amp);
        st += s.time;
        sy += y;
        stt += s.time * s.time;
        sty += s.time * y;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double denom = n * stt - st * st;
    if (denom <= 0.0) return std::nullopt;
    return GrowthFit{(n * sty - st * sy) / denom, n};
}

/// CSV: t,lambda_0..lambda_{R-1},omega_0..omega_{R-1},residual
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int regions) {
    os << "t";
    for (int x = 0; x < regions; ++x) os << ",lambda_" << x;
    for (int x = 0; x < regions; ++x) os << ",omega_" << x;
    os << ",residual\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (const auto& s : traj.samples) {
        put(s.time);
        for (double l : s.lambda) os << ',', put(l);
        for (int x = 0; x < regions; ++x) {
            os << ',';
            if (s.real_wages.empty()) os << "nan";
            else put(s.real_wages[static_cast<std::size_t>(x)]);
        }
        os << ',';
        put(s.residual);
        os << '\n';
    }
}

}  // namespace racetrack
