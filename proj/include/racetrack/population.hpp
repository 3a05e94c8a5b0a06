#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "racetrack/params.hpp"

namespace racetrack {

/// Mobile-worker masses over the R ring regions at a given time.
struct PopulationState {
    std::vector<double> lambda;
    double time = 0.0;

    int regions() const noexcept { return static_cast<int>(lambda.size()); }
    double total() const { return std::accumulate(lambda.begin(), lambda.end(), 0.0); }
};

/// Relative tolerance on sum(lambda) == Lambda.
inline constexpr double population_rel_tol = 1e-9;

class PopulationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::vector<std::string> population_violations(const PopulationState& s, const ModelParams& p,
                                                      double rel_tol = population_rel_tol) {
    std::vector<std::string> out;
    if (s.regions() != p.R)
        out.push_back("population has " + std::to_string(s.regions()) + " entries, expected R = " +
                      std::to_string(p.R));
    for (std::size_t x = 0; x < s.lambda.size(); ++x) {
        if (!std::isfinite(s.lambda[x]) || s.lambda[x] < 0.0)
            out.push_back("lambda[" + std::to_string(x) + "] must be finite and >= 0");
    }
    const double residual = std::abs(s.total() - p.Lambda);
    if (!(residual <= rel_tol * p.Lambda))
        out.push_back("sum(lambda) deviates from Lambda by " + std::to_string(residual));
    return out;
}

inline void check_population(const PopulationState& s, const ModelParams& p,
                             double rel_tol = population_rel_tol) {
    auto v = population_violations(s, p, rel_tol);
    if (v.empty()) return;
    std::string msg = "invalid population:";
    for (const auto& e : v) msg += " " + e + ";";
    throw PopulationError(msg);
}

inline PopulationState homogeneous_state(const ModelParams& p) {
    return {std::vector<double>(static_cast<std::size_t>(p.R), p.mean_mobile()), 0.0};
}

namespace detail {

inline void rescale_to_total(std::vector<double>& lambda, double total) {
    const double s = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    if (s > 0.0)
        for (auto& l : lambda) l *= total / s;
}

inline void require_nonnegative(const std::vector<double>& lambda) {
    if (std::any_of(lambda.begin(), lambda.end(), [](double l) { return l < 0.0; }))
        throw PopulationError("perturbation amplitude drives a region below zero");
}

}  // namespace detail

/// lambda_x = lambda_bar + amplitude * cos(2 pi k x / R), rescaled to sum Lambda.
inline PopulationState cosine_perturbation(const ModelParams& p, int mode, double amplitude) {
    if (amplitude < 0.0) throw PopulationError("perturbation amplitude must be >= 0");
    PopulationState s = homogeneous_state(p);
    for (int x = 0; x < p.R; ++x)
        s.lambda[static_cast<std::size_t>(x)] +=
            amplitude * std::cos(2.0 * std::numbers::pi * mode * x / p.R);
    detail::require_nonnegative(s.lambda);
    detail::rescale_to_total(s.lambda, p.Lambda);
    return s;
}

/// Zero-sum random perturbation with max |delta| = amplitude; deterministic in `seed`.
inline PopulationState random_perturbation(const ModelParams& p, double amplitude, std::uint64_t seed) {
    if (amplitude < 0.0) throw PopulationError("perturbation amplitude must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> delta(static_cast<std::size_t>(p.R));
    for (auto& d : delta) d = unit(rng);
    const double mean = std::accumulate(delta.begin(), delta.end(), 0.0) / p.R;
    double peak = 0.0;
    for (auto& d : delta) {
        d -= mean;
        peak = std::max(peak, std::abs(d));
    }
    PopulationState s = homogeneous_state(p);
    for (std::size_t x = 0; x < delta.size(); ++x)
        s.lambda[x] += peak > 0.0 ? amplitude * delta[x] / peak : 0.0;
    detail::require_nonnegative(s.lambda);
    detail::rescale_to_total(s.lambda, p.Lambda);
    return s;
}

/// Shifts every region forward by `shift` ring positions.
inline PopulationState rotated(const PopulationState& s, int shift) {
    const int n = s.regions();
    PopulationState out{std::vector<double>(s.lambda.size()), s.time};
    for (int x = 0; x < n; ++x) out.lambda[static_cast<std::size_t>(((x + shift) % n + n) % n)] = s.lambda[static_cast<std::size_t>(x)];
    return out;
}

}  // namespace racetrack
