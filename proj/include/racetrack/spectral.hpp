#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "racetrack/dynamics.hpp"
#include "racetrack/fourier.hpp"
#include "racetrack/geometry.hpp"
#include "racetrack/matrix.hpp"
#include "racetrack/params.hpp"
#include "racetrack/population.hpp"

namespace racetrack {

class ModelConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Homogeneous stationary state
// ---------------------------------------------------------------------------

/// Prices, wages and real wages at lambda_x = Lambda / R.
struct StationaryProfile {
    double theta = 0.0;      ///< own-region price Theta(tau)
    double theta_bar = 0.0;  ///< Theta(0) = aF / (2bF + c Lambda)
    std::vector<double> p_bar;  ///< p_bar[m] = Theta + (tau/2)|m|
    double w_bar = 0.0;
    double omega_bar = 0.0;
};

inline StationaryProfile stationary_profile(const ModelParams& p) {
    const int R = p.R;
    const double lb = p.mean_mobile();
    const double scale = p.price_scale();
    const auto dist = arc_distances(R);

    StationaryProfile s;
    s.theta_bar = p.a * p.F / scale;
    s.theta = s.theta_bar + p.c * lb * p.tau / (2.0 * scale) * total_arc_distance(R);
    s.p_bar.resize(dist.size());
    for (std::size_t m = 0; m < dist.size(); ++m) s.p_bar[m] = s.theta + 0.5 * p.tau * dist[m];

    double margins = 0.0, sum = 0.0, squares = 0.0;
    for (std::size_t m = 0; m < dist.size(); ++m) {
        const double margin = s.p_bar[m] - p.tau * dist[m];
        margins += margin * margin;
        sum += s.p_bar[m];
        squares += s.p_bar[m] * s.p_bar[m];
    }
    s.w_bar = p.demand_slope() / p.F * margins * (p.mean_immobile() + lb);
    // The aggregate sum_z lambda_z p_zx is lb * sum, hence lb^2 in the last term.
    s.omega_bar = s.w_bar - p.a * lb / p.F * sum + p.demand_slope() * lb / (2.0 * p.F) * squares -
                  p.c * lb * lb / (2.0 * p.F * p.F) * sum * sum;
    return s;
}

// ---------------------------------------------------------------------------
// General-R modal growth rates
// ---------------------------------------------------------------------------

/// Modal sums of the stationary profile for Fourier mode k (e^{+i 2 pi k m / R} weighting).
struct ModalFactors {
    Complex price;         ///< sum p_bar_m e
    Complex margin;        ///< sum (p_bar_m - tau|m|) e
    Complex margin_sq;     ///< sum (p_bar_m - tau|m|)^2 e
    Complex price_sq;      ///< sum p_bar_m^2 e
    double price_total;    ///< sum p_bar_m
};

/// Responses of the linearised system to a unit mode amplitude lambda_hat_k = 1.
struct ModalResponse {
    ModalFactors factors;
    Complex price_hat;
    Complex wage_hat;
    Complex real_wage_hat;  ///< equals Omega_k
};

inline void check_mode(const ModelParams& p, int k) {
    if (k == 0) throw std::invalid_argument("mode k = 0 carries no perturbation (population is conserved)");
    if (k < 1 || k >= p.R)
        throw std::out_of_range("mode k = " + std::to_string(k) + " outside [1, R-1]");
}

inline ModalResponse modal_response(const ModelParams& p, int k) {
    check_mode(p, k);
    const int R = p.R;
    const auto profile = stationary_profile(p);
    const auto dist = arc_distances(R);

    std::vector<double> margin(dist.size()), margin_sq(dist.size()), price_sq(dist.size());
    for (std::size_t m = 0; m < dist.size(); ++m) {
        margin[m] = profile.p_bar[m] - p.tau * dist[m];
        margin_sq[m] = margin[m] * margin[m];
        price_sq[m] = profile.p_bar[m] * profile.p_bar[m];
    }

    ModalResponse r;
    r.factors.price = modal_sum(profile.p_bar, k);
    r.factors.margin = modal_sum(margin, k);
    r.factors.margin_sq = modal_sum(margin_sq, k);
    r.factors.price_sq = modal_sum(price_sq, k);
    r.factors.price_total = 0.0;
    for (double v : profile.p_bar) r.factors.price_total += v;

    const double slope = p.demand_slope();
    const double lb = p.mean_mobile();
    const double S = r.factors.price_total;

    r.price_hat = p.c / p.price_scale() * r.factors.price;
    r.wage_hat = slope / p.F * r.factors.margin_sq +
                 2.0 * (p.mean_immobile() + lb) * slope / p.F * r.factors.margin * r.price_hat;
    r.real_wage_hat = r.wage_hat - p.a / p.F * r.factors.price + slope / (2.0 * p.F) * r.factors.price_sq -
                      p.c * lb / (p.F * p.F) * S * r.factors.price +
                      (-p.a * p.Lambda / p.F + p.b * p.Lambda / (p.F * R) * S) * r.price_hat;
    return r;
}

/// Omega_k from the Fourier-transformed linear system; mode k evolves as
/// d lambda_hat_k / dt = v lambda_bar Omega_k lambda_hat_k.
inline double omega_numeric(const ModelParams& p, int k) {
    const Complex w = modal_response(p, k).real_wage_hat;
    if (std::abs(w.imag()) > 1e-10 * (1.0 + std::abs(w.real())))
        throw ModelConsistencyError("Omega_" + std::to_string(k) + " has imaginary part " +
                                    std::to_string(w.imag()));
    return w.real();
}

/// Omega_k for k = 1..R-1 (index 0 holds k = 1).
inline std::vector<double> omega_modes(const ModelParams& p) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(p.R - 1));
    for (int k = 1; k < p.R; ++k) out.push_back(omega_numeric(p, k));
    return out;
}

// ---------------------------------------------------------------------------
// Closed forms for R = 2, 3, 4
// ---------------------------------------------------------------------------

/// Omega_k = A tau^2 + B tau for the k = 1 family; Omega_2 = C tau^2 when R = 4.
struct QuadCoefficients {
    double A = 0.0;
    double B = 0.0;
    std::optional<double> C;
};

enum class CoefficientForm {
    /// Coefficients consistent with the modal equations they are collected from.
    corrected,
    /// A widely quoted transcription of the R = 3 coefficients. They differ from `corrected` in
    /// three terms: the (b+cn)/(2F) c Lambda 4 pi^2 term carries 9 instead of 27,
    /// the last A bracket carries b Lambda / F instead of b Lambda / (3F), and B
    /// omits a pi / (3F). R = 2 and R = 4 are identical in both forms.
    as_printed,
};

inline bool has_closed_form(int regions) { return regions >= 2 && regions <= 4; }

inline QuadCoefficients quad_coefficients(const ModelParams& p,
                                          CoefficientForm form = CoefficientForm::corrected) {
    using std::numbers::pi;
    const double s = p.demand_slope();  // b + cn
    const double F = p.F, a = p.a, b = p.b, c = p.c, L = p.Lambda;
    const double D = p.price_scale();   // 2bF + c Lambda
    const double Tb = a * F / D;         // Theta_bar
    const double lb = p.mean_mobile();
    const double ph = p.mean_immobile();
    const double pi2 = pi * pi;

    QuadCoefficients q;
    switch (p.R) {
        case 2:
            q.A = s / F * (c * lb * pi2 / (2 * D) - pi2 / 4)
                - 2 * (ph + lb) * s / F * c / D * pi2 / 4
                - s / (2 * F) * (c * lb * pi2 / (2 * D) + pi2 / 4)
                + c * lb / (F * F) * (c * lb * pi2 / (2 * D) + pi2 / 4)
                - (b * L * c * c * lb * pi2 / (4 * F * D * D) + b * L * c * pi2 / (8 * F * D));
            q.B = s / F * pi * Tb + a * pi / (2 * F) - s / (2 * F) * pi * Tb + c * lb / (F * F) * pi * Tb
                + a * L * c * pi / (2 * F * D) - b * L * Tb * c * pi / (2 * F * D);
            break;
        case 3: {
            const bool printed = form == CoefficientForm::as_printed;
            const double share_denom = printed ? 9.0 : 27.0;
            const double tail_scale = printed ? 1.0 : 1.0 / 3.0;
            q.A = s / F * c * L * 4 * pi2 / (27 * D)
                - s / F * pi2 / 9
                - 2 * (ph + lb) * s / F * c * pi2 / (9 * D)
                - s / (2 * F) * c * L * 4 * pi2 / (share_denom * D)
                - s / (2 * F) * pi2 / 9
                + c * lb / (F * F) * c * L * 2 * pi2 / (9 * D)
                + c * lb / (F * F) * 2 * pi2 / 9
                - tail_scale * b * L / F * (c * c * L * 2 * pi2 / (9 * D * D) + 2 * pi2 * c / (9 * D));
            q.B = s / F * 2 * pi / 3 * Tb
                + (printed ? 0.0 : a * pi / (3 * F))
                - s / (2 * F) * 2 * pi / 3 * Tb
                + c * lb / (F * F) * pi * Tb
                + a * L * c * pi / (3 * F * D)
                - b * L / (3 * F) * Tb * c * pi / D;
            break;
        }
        case 4:
            q.A = s / F * (c * lb * pi2 / D - pi2 / 4)
                - 2 * (ph + lb) * s * c * pi2 / (4 * F * D)
                - s / (2 * F) * (c * lb * pi2 / D + pi2 / 4)
                + c * lb / (F * F) * (2 * c * lb * pi2 / D + pi2 / 2)
                - b * L / F * c * c * lb * pi2 / (2 * D * D)
                - b * L / (4 * F) * c * pi2 / (2 * D);
            q.B = s / F * pi * Tb + a * pi / (2 * F) - s / (2 * F) * pi * Tb + c * lb / (F * F) * 2 * Tb * pi
                + a * L / F * c * pi / (2 * D) - b * L / F * Tb * c * pi / (2 * D);
            q.C = s * pi2 / (8 * F) + s / (2 * F) * pi2 / 8;
            break;
        default:
            throw std::invalid_argument("closed-form coefficients exist only for R in {2, 3, 4}, got R = " +
                                        std::to_string(p.R));
    }
    return q;
}

/// Closed-form Omega_k for R in {2, 3, 4}.
inline double closed_form_omega(const ModelParams& p, int k,
                                CoefficientForm form = CoefficientForm::corrected) {
    check_mode(p, k);
    const auto q = quad_coefficients(p, form);
    if (p.R == 4 && k == 2) return *q.C * p.tau * p.tau;
    return q.A * p.tau * p.tau + q.B * p.tau;
}

// ---------------------------------------------------------------------------
// Finite-difference Jacobian at the homogeneous state
// ---------------------------------------------------------------------------

struct JacobianSpectrum {
    /// d rhs / d lambda restricted to population-conserving perturbations.
    SquareMatrix jacobian;
    /// Circulant eigenvalues, index k = 0..R-1; entries k >= 1 equal v lambda_bar Omega_k.
    std::vector<double> eigenvalues;
    double max_imag = 0.0;
    double circulant_residual = 0.0;  ///< relative to max |J|
};

inline constexpr double circulant_tol = 1e-6;

/// Central differences with one Richardson extrapolation. Column x perturbs
/// region x by +h and every other region by -h/(R-1); columns are scaled by
/// (R-1)/R so the matrix acts on lambda itself rather than on that direction.
inline JacobianSpectrum jacobian_fd(const ModelParams& p, double rel_step = 1e-6) {
    validate_params(p);
    const int R = p.R;
    const auto n = static_cast<std::size_t>(R);
    const double lb = p.mean_mobile();
    const double h = rel_step * lb;
    const std::vector<double> base(n, lb);

    auto central = [&](int x, double step) {
        std::vector<double> plus = base, minus = base;
        for (std::size_t z = 0; z < n; ++z) {
            const double d = static_cast<int>(z) == x ? step : -step / (R - 1);
            plus[z] += d;
            minus[z] -= d;
        }
        const auto fp = detail::migration_rhs(plus, p).rate;
        const auto fm = detail::migration_rhs(minus, p).rate;
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = (fp[i] - fm[i]) / (2.0 * step);
        return col;
    };

    JacobianSpectrum out;
    out.jacobian = SquareMatrix(R);
    const double to_lambda = static_cast<double>(R - 1) / R;
    for (int x = 0; x < R; ++x) {
        const auto coarse = central(x, h);
        const auto fine = central(x, 0.5 * h);
        for (int i = 0; i < R; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            out.jacobian(i, x) = to_lambda * (4.0 * fine[ii] - coarse[ii]) / 3.0;
        }
    }

    double peak = 0.0, worst = 0.0;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j) {
            peak = std::max(peak, std::abs(out.jacobian(i, j)));
            worst = std::max(worst, std::abs(out.jacobian(i, j) - out.jacobian(0, ring_offset(j, i, R))));
        }
    out.circulant_residual = peak > 0.0 ? worst / peak : 0.0;
    if (out.circulant_residual > circulant_tol)
        throw ModelConsistencyError("finite-difference Jacobian is not circulant (relative residual " +
                                    std::to_string(out.circulant_residual) + ")");

    out.eigenvalues.resize(n);
    for (int k = 0; k < R; ++k) {
        const Complex mu = modal_sum(out.jacobian.row(0), k);
        out.eigenvalues[static_cast<std::size_t>(k)] = mu.real();
        out.max_imag = std::max(out.max_imag, std::abs(mu.imag()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Break points
// ---------------------------------------------------------------------------

/// First positive root of tau -> omega_numeric(p.with_tau(tau), k), by bracketing
/// over tau = 2^j, j = -20..20, then bisection.
inline std::optional<double> critical_tau_bisection(const ModelParams& p, int k) {
    check_mode(p, k);
    auto f = [&](double t) { return omega_numeric(p.with_tau(t), k); };
    double lo = std::ldexp(1.0, -20);
    double f_lo = f(lo);
    if (f_lo == 0.0) return lo;
    std::optional<double> hi;
    for (int j = -19; j <= 20; ++j) {
        const double t = std::ldexp(1.0, j);
        const double ft = f(t);
        if ((ft < 0.0) != (f_lo < 0.0) || ft == 0.0) {
            hi = t;
            break;
        }
        lo = t;
        f_lo = ft;
    }
    if (!hi) return std::nullopt;
    double up = *hi;
    for (int it = 0; it < 200 && up - lo > 1e-15 * up; ++it) {
        const double mid = 0.5 * (lo + up);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            up = mid;
        }
    }
    return 0.5 * (lo + up);
}

/// tau* > 0 with Omega_k(tau*) = 0, or nullopt when Omega_k has no positive root.
/// Closed-form root for R in {2, 3, 4}; bisection otherwise.
inline std::optional<double> critical_tau(const ModelParams& p, int k) {
    check_mode(p, k);
    if (!has_closed_form(p.R)) return critical_tau_bisection(p, k);
    const auto q = quad_coefficients(p);
    if (p.R == 4 && k == 2) return std::nullopt;  // C tau^2 has no positive root
    if (q.A == 0.0) return std::nullopt;
    const double root = -q.B / q.A;
    if (root > 0.0) return root;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

enum class Stability { stable, unstable, marginal };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "unknown";
}

inline constexpr double marginal_band = 1e-12;

struct SpectralReport {
    int R = 0;
    double tau = 0.0;
    std::vector<double> omega_modes;  ///< Omega_k, k = 1..R-1, without the v lambda_bar factor
    std::optional<QuadCoefficients> quad_coeffs;
    std::vector<std::optional<double>> critical_tau;  ///< per mode k = 1..R-1
    Stability classification = Stability::marginal;
};

inline Stability classify(const std::vector<double>& omegas) {
    const double top = *std::max_element(omegas.begin(), omegas.end());
    if (top > marginal_band) return Stability::unstable;
    if (top < -marginal_band) return Stability::stable;
    return Stability::marginal;
}

inline SpectralReport stability_report(const ModelParams& p) {
    validate_params(p);
    SpectralReport r;
    r.R = p.R;
    r.tau = p.tau;
    r.omega_modes = omega_modes(p);
    if (has_closed_form(p.R)) r.quad_coeffs = quad_coefficients(p);
    for (int k = 1; k < p.R; ++k) r.critical_tau.push_back(critical_tau(p, k));
    r.classification = classify(r.omega_modes);
    return r;
}

// ---------------------------------------------------------------------------
// Sign pattern over random parameter draws
// ---------------------------------------------------------------------------

struct SignFailure {
    ModelParams params;
    std::string which;  ///< e.g. "A3 >= 0"
};

struct SignSampleReport {
    int draws = 0;
    std::vector<SignFailure> failures;
};

/// Draws a, b, c, F, Lambda, Phi log-uniformly on [1e-2, 1e2] and checks
/// A < 0, B > 0 for R = 2, 3, 4 and C > 0 for R = 4.
inline SignSampleReport sample_sign_pattern(int draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> expo(-2.0, 2.0);
    auto draw = [&] { return std::pow(10.0, expo(rng)); };
    SignSampleReport report;
    report.draws = draws;
    for (int i = 0; i < draws; ++i) {
        ModelParams p;
        p.a = draw();
        p.b = draw();
        p.c = draw();
        p.F = draw();
        p.Lambda = draw();
        p.Phi = draw();
        for (int R = 2; R <= 4; ++R) {
            const auto q = quad_coefficients(p.with_regions(R));
            const std::string tag = std::to_string(R);
            if (!(q.A < 0.0)) report.failures.push_back({p.with_regions(R), "A" + tag + " >= 0"});
            if (!(q.B > 0.0)) report.failures.push_back({p.with_regions(R), "B" + tag + " <= 0"});
            if (q.C && !(*q.C > 0.0)) report.failures.push_back({p.with_regions(R), "C4 <= 0"});
        }
    }
    return report;
}

}  // namespace racetrack
