#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "racetrack/geometry.hpp"
#include "racetrack/matrix.hpp"
#include "racetrack/params.hpp"
#include "racetrack/population.hpp"

namespace racetrack {

class NonContractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DemandWarning {
    int origin;
    int destination;
    double value;
};

struct DemandResult {
    DemandMatrix q;
    /// Entries where the linear demand went negative. The model is still evaluated.
    std::vector<DemandWarning> negative_entries;
};

struct EquilibriumSnapshot {
    PriceMatrix prices;
    DemandMatrix demand;
    WageVector wages;
    RealWageVector real_wages;
    double avg_real_wage = 0.0;
    std::vector<DemandWarning> warnings;
};

namespace detail {

inline std::size_t idx(int i) { return static_cast<std::size_t>(i); }

// Unchecked kernels. The public overloads below validate their inputs; the
// integrator calls these directly on intermediate Runge-Kutta stages.

inline PriceMatrix solve_prices(std::span<const double> lambda, const ModelParams& p) {
    const int R = p.R;
    const double coupling = p.c / (2.0 * (p.b * p.F + p.c * p.Lambda));
    const double base = p.a / (2.0 * p.demand_slope());
    double mass = 0.0;
    for (double l : lambda) mass += l;

    // For each destination y the aggregate S_y = sum_z lambda_z p_zy solves
    // S_y = mass * base + coupling * mass * S_y + (tau/2) sum_z lambda_z |z - y|.
    const double denom = 1.0 - coupling * mass;
    if (!(denom > 0.0))
        throw NonContractionError("price fixed point is not a contraction (1 - c*sum(lambda)/(2(bF+cLambda)) <= 0)");

    const auto dist = arc_distances(R);
    PriceMatrix prices(R);
    for (int y = 0; y < R; ++y) {
        double weighted = 0.0;
        for (int z = 0; z < R; ++z) weighted += lambda[idx(z)] * dist[idx(ring_offset(z, y, R))];
        const double aggregate = (mass * base + 0.5 * p.tau * weighted) / denom;
        for (int x = 0; x < R; ++x)
            prices(x, y) = base + coupling * aggregate + 0.5 * p.tau * dist[idx(ring_offset(x, y, R))];
    }
    return prices;
}

inline WageVector nominal_wages(const PriceMatrix& prices, std::span<const double> lambda,
                                const ModelParams& p) {
    const int R = p.R;
    const double phi = p.mean_immobile();
    const auto dist = arc_distances(R);
    WageVector w{std::vector<double>(idx(R), 0.0)};
    for (int x = 0; x < R; ++x) {
        double s = 0.0;
        for (int z = 0; z < R; ++z) {
            const double margin = prices(x, z) - p.tau * dist[idx(ring_offset(x, z, R))];
            s += margin * margin * (phi + lambda[idx(z)]);
        }
        w.values[idx(x)] = p.demand_slope() / p.F * s;
    }
    return w;
}

inline RealWageVector real_wages(const WageVector& wages, const PriceMatrix& prices,
                                 std::span<const double> lambda, const ModelParams& p) {
    const int R = p.R;
    RealWageVector omega{std::vector<double>(idx(R), 0.0)};
    for (int x = 0; x < R; ++x) {
        double index = 0.0;    // sum_z lambda_z p_zx
        double squares = 0.0;  // sum_z lambda_z p_zx^2
        for (int z = 0; z < R; ++z) {
            index += lambda[idx(z)] * prices(z, x);
            squares += lambda[idx(z)] * prices(z, x) * prices(z, x);
        }
        omega.values[idx(x)] = wages.values[idx(x)] - p.a / p.F * index +
                               p.demand_slope() / (2.0 * p.F) * squares -
                               p.c / (2.0 * p.F * p.F) * index * index;
    }
    return omega;
}

inline double average_real_wage(const RealWageVector& omega, std::span<const double> lambda,
                                const ModelParams& p) {
    double s = 0.0;
    for (std::size_t z = 0; z < lambda.size(); ++z) s += omega.values[z] * lambda[z];
    return s / p.Lambda;
}

}  // namespace detail

inline void check_prices(const PriceMatrix& prices, const ModelParams& p) {
    if (prices.size() != p.R) throw std::invalid_argument("price matrix size does not match R");
}

/// Equilibrium prices for the given population (closed-form per destination).
inline PriceMatrix solve_prices(const PopulationState& lambda, const ModelParams& p) {
    check_population(lambda, p);
    return detail::solve_prices(lambda.lambda, p);
}

/// q_xy = (b + cn)(p_xy - tau |x - y|), valid when `prices` solve the pricing rule.
inline DemandResult demand(const PriceMatrix& prices, const ModelParams& p, const PopulationState& lambda) {
    check_population(lambda, p);
    check_prices(prices, p);
    const int R = p.R;
    DemandResult out{DemandMatrix(R), {}};
    for (int x = 0; x < R; ++x)
        for (int y = 0; y < R; ++y) {
            const double q = p.demand_slope() * (prices(x, y) - p.tau * ring_distance(x, y, R));
            out.q(x, y) = q;
            if (q < 0.0) out.negative_entries.push_back({x, y, q});
        }
    return out;
}

/// q_xy = a - (b + cn) p_xy + c G_y with price index G_y = sum_z (lambda_z / F) p_zy.
/// Holds for arbitrary prices; equals demand() only at equilibrium.
inline DemandMatrix primitive_demand(const PriceMatrix& prices, const ModelParams& p,
                                     const PopulationState& lambda) {
    check_population(lambda, p);
    check_prices(prices, p);
    const int R = p.R;
    DemandMatrix q(R);
    for (int y = 0; y < R; ++y) {
        double G = 0.0;
        for (int z = 0; z < R; ++z) G += lambda.lambda[detail::idx(z)] / p.F * prices(z, y);
        for (int x = 0; x < R; ++x) q(x, y) = p.a - p.demand_slope() * prices(x, y) + p.c * G;
    }
    return q;
}

inline WageVector nominal_wages(const PriceMatrix& prices, const PopulationState& lambda,
                                const ModelParams& p) {
    check_population(lambda, p);
    check_prices(prices, p);
    return detail::nominal_wages(prices, lambda.lambda, p);
}

inline RealWageVector real_wages(const WageVector& wages, const PriceMatrix& prices,
                                 const PopulationState& lambda, const ModelParams& p) {
    check_population(lambda, p);
    check_prices(prices, p);
    if (wages.values.size() != lambda.lambda.size())
        throw std::invalid_argument("wage vector size does not match R");
    return detail::real_wages(wages, prices, lambda.lambda, p);
}

inline double average_real_wage(const RealWageVector& omega, const PopulationState& lambda,
                                const ModelParams& p) {
    check_population(lambda, p);
    if (omega.values.size() != lambda.lambda.size())
        throw std::invalid_argument("real wage vector size does not match R");
    return detail::average_real_wage(omega, lambda.lambda, p);
}

/// Firm profit per region: sum_z (p_xz - tau|x-z|) q_xz (phi + lambda_z) - F w_x.
/// Zero everywhere under free entry.
inline std::vector<double> profits(const PriceMatrix& prices, const DemandMatrix& q, const WageVector& wages,
                                   const PopulationState& lambda, const ModelParams& p) {
    const int R = p.R;
    std::vector<double> out(detail::idx(R));
    for (int x = 0; x < R; ++x) {
        double revenue = 0.0;
        for (int z = 0; z < R; ++z)
            revenue += (prices(x, z) - p.tau * ring_distance(x, z, R)) * q(x, z) *
                       (p.mean_immobile() + lambda.lambda[detail::idx(z)]);
        out[detail::idx(x)] = revenue - p.F * wages.values[detail::idx(x)];
    }
    return out;
}

inline EquilibriumSnapshot solve_equilibrium(const PopulationState& lambda, const ModelParams& p) {
    EquilibriumSnapshot s;
    s.prices = solve_prices(lambda, p);
    auto d = demand(s.prices, p, lambda);
    s.demand = std::move(d.q);
    s.warnings = std::move(d.negative_entries);
    s.wages = detail::nominal_wages(s.prices, lambda.lambda, p);
    s.real_wages = detail::real_wages(s.wages, s.prices, lambda.lambda, p);
    s.avg_real_wage = detail::average_real_wage(s.real_wages, lambda.lambda, p);
    return s;
}

}  // namespace racetrack
