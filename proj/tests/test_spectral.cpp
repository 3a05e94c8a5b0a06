#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "racetrack/checks.hpp"
#include "racetrack/spectral.hpp"

using namespace racetrack;
using std::numbers::pi;

namespace {

ModelParams reference(int R = 2, double tau = 1.0) {
    ModelParams p;
    p.R = R;
    p.tau = tau;
    return p;
}

std::vector<double> tau_grid(int n, double hi) {
    std::vector<double> t;
    for (int i = 1; i <= n; ++i) t.push_back(hi * i / n);
    return t;
}

}  // namespace

TEST(StationaryProfile, ZeroTransportCost) {
    for (int R = 2; R <= 8; ++R) {
        const auto prof = stationary_profile(reference(R, 0.0));
        EXPECT_DOUBLE_EQ(prof.theta, prof.theta_bar);
        for (double v : prof.p_bar) EXPECT_DOUBLE_EQ(v, prof.theta_bar);
    }
}

TEST(StationaryProfile, ReferenceThetaBar) {
    EXPECT_NEAR(stationary_profile(reference(2, 1.0)).theta_bar, 1.0 / 3.0, 1e-16);
}

TEST(StationaryProfile, TwoRegionTheta) {
    ModelParams p = reference(2, 0.8);
    p.a = 1.7;
    p.c = 0.4;
    p.F = 2.2;
    const auto prof = stationary_profile(p);
    const double D = 2 * p.b * p.F + p.c * p.Lambda;
    EXPECT_NEAR(prof.theta, prof.theta_bar + p.c * p.mean_mobile() * pi / (2 * D) * p.tau, 1e-15);
    EXPECT_NEAR(prof.p_bar[1], prof.theta + pi / 2 * p.tau, 1e-15);
}

TEST(StationaryProfile, ThreeAndFourRegionTheta) {
    ModelParams p = reference(3, 1.1);
    const double D = p.price_scale();
    EXPECT_NEAR(stationary_profile(p).theta, p.a * p.F / D + p.c * p.Lambda * 2 * pi * p.tau / (9 * D), 1e-15);
    p.R = 4;
    EXPECT_NEAR(stationary_profile(p).theta, p.a * p.F / D + p.c * p.mean_mobile() * pi / D * p.tau, 1e-15);
}

TEST(StationaryProfile, RingSymmetry) {
    for (int R = 2; R <= 11; ++R) {
        const auto prof = stationary_profile(reference(R, 0.7));
        for (int m = 1; m < R; ++m) EXPECT_DOUBLE_EQ(prof.p_bar[m], prof.p_bar[R - m]);
    }
}

TEST(OmegaNumeric, VanishesAtZeroTransportCost) {
    for (int R = 2; R <= 10; ++R)
        for (int k = 1; k < R; ++k) EXPECT_NEAR(omega_numeric(reference(R, 0.0), k), 0.0, 1e-14);
}

TEST(OmegaNumeric, FourRegionModeTwoPriceFactorVanishes) {
    for (double tau : {0.1, 1.0, 7.5}) {
        const auto r = modal_response(reference(4, tau), 2);
        EXPECT_NEAR(std::abs(r.factors.price), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(r.price_hat), 0.0, 1e-12);
    }
}

TEST(OmegaNumeric, ThreeRegionModesCoincide) {
    for (double tau : tau_grid(50, 10.0)) {
        const auto p = reference(3, tau);
        const double o1 = omega_numeric(p, 1), o2 = omega_numeric(p, 2);
        EXPECT_LE(relative_error(o1, o2), 1e-10);
    }
}

TEST(OmegaNumeric, ModeSymmetry) {
    for (int R = 2; R <= 12; ++R) {
        const auto p = reference(R, 0.9);
        for (int k = 1; k < R; ++k) EXPECT_LE(relative_error(omega_numeric(p, k), omega_numeric(p, R - k)), 1e-10);
    }
}

TEST(OmegaNumeric, ModeRangeChecked) {
    const auto p = reference(4);
    EXPECT_THROW(omega_numeric(p, 0), std::invalid_argument);
    EXPECT_THROW(omega_numeric(p, 4), std::out_of_range);
    EXPECT_THROW(omega_numeric(p, -1), std::out_of_range);
}

TEST(OmegaNumeric, IndependentOfMigrationSpeed) {
    auto p = reference(5, 0.8);
    const double base = omega_numeric(p, 2);
    p.v = 13.0;
    EXPECT_DOUBLE_EQ(omega_numeric(p, 2), base);
}

TEST(QuadCoefficients, ReferenceSignPattern) {
    for (int R = 2; R <= 4; ++R) {
        const auto q = quad_coefficients(reference(R));
        EXPECT_LT(q.A, 0.0) << "R=" << R;
        EXPECT_GT(q.B, 0.0) << "R=" << R;
    }
    const auto q4 = quad_coefficients(reference(4));
    ASSERT_TRUE(q4.C);
    EXPECT_GT(*q4.C, 0.0);
    EXPECT_FALSE(quad_coefficients(reference(2)).C);
}

TEST(QuadCoefficients, FourRegionC) {
    const auto p = reference(4);
    const double s = p.demand_slope();
    EXPECT_NEAR(*quad_coefficients(p).C, s * pi * pi / (8 * p.F) + s * pi * pi / (16 * p.F), 1e-14);
}

TEST(QuadCoefficients, UnsupportedRegionCount) {
    EXPECT_THROW(quad_coefficients(reference(5)), std::invalid_argument);
    EXPECT_THROW(closed_form_omega(reference(6), 1), std::invalid_argument);
}

TEST(QuadCoefficients, AgreeWithFourierPipeline) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> expo(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams p;
        p.a = std::pow(10, expo(rng));
        p.b = std::pow(10, expo(rng));
        p.c = std::pow(10, expo(rng));
        p.F = std::pow(10, expo(rng));
        p.Phi = std::pow(10, expo(rng));
        p.Lambda = std::pow(10, expo(rng));
        for (int R = 2; R <= 4; ++R)
            for (double tau : tau_grid(20, 10.0))
                for (int k = 1; k < R; ++k) {
                    const auto q = p.with_regions(R).with_tau(tau);
                    EXPECT_LE(relative_error(closed_form_omega(q, k), omega_numeric(q, k)), 1e-9)
                        << "R=" << R << " k=" << k << " tau=" << tau;
                }
    }
}

TEST(QuadCoefficients, PrintedThreeRegionFormDisagrees) {
    // The as-printed R = 3 variant drops a factor in two A terms and a term of B;
    // for R = 2 and R = 4 the two variants coincide.
    const auto p3 = reference(3, 1.0);
    const auto fixed = quad_coefficients(p3);
    const auto printed = quad_coefficients(p3, CoefficientForm::as_printed);
    EXPECT_GT(relative_error(fixed.A, printed.A), 1e-3);
    EXPECT_NEAR(fixed.B - printed.B, p3.a * pi / (3 * p3.F), 1e-14);
    EXPECT_GT(relative_error(closed_form_omega(p3, 1, CoefficientForm::as_printed), omega_numeric(p3, 1)), 1e-3);
    for (int R : {2, 4}) {
        const auto a = quad_coefficients(reference(R), CoefficientForm::corrected);
        const auto b = quad_coefficients(reference(R), CoefficientForm::as_printed);
        EXPECT_EQ(a.A, b.A);
        EXPECT_EQ(a.B, b.B);
    }
}

TEST(JacobianFd, TwoRegionMatchesClosedForm) {
    const auto p = reference(2, 1.0);
    const auto fd = jacobian_fd(p);
    const auto q = quad_coefficients(p);
    const double expected = p.v * p.mean_mobile() * (q.A + q.B);
    EXPECT_LE(relative_error(fd.eigenvalues[1], expected), 1e-5);
}

TEST(JacobianFd, ConservedDirectionCarriesNoEigenvalue) {
    for (int R = 2; R <= 8; ++R) {
        const auto fd = jacobian_fd(reference(R, 0.7));
        double scale = 0.0;
        for (double e : fd.eigenvalues) scale = std::max(scale, std::abs(e));
        EXPECT_LE(std::abs(fd.eigenvalues[0]), 1e-6 * scale);
        EXPECT_LE(fd.circulant_residual, circulant_tol);
        EXPECT_LE(fd.max_imag, 1e-6 * scale);
    }
}

TEST(JacobianFd, FourRegionModeTwoAlwaysUnstable) {
    for (double tau : {0.1, 1.0, 10.0}) EXPECT_GT(jacobian_fd(reference(4, tau)).eigenvalues[2], 0.0);
}

TEST(JacobianFd, MatchesOracleJacobian) {
    // Forward-free oracle: central differences of the fixed-point/scalar-loop RHS
    // along zero-sum Fourier vectors, no Richardson step.
    const auto p = reference(3, 0.9);
    const int R = 3;
    const double lb = p.mean_mobile(), h = 1e-5 * lb;
    oracle::Grid J(R, std::vector<double>(R));
    for (int x = 0; x < R; ++x) {
        std::vector<double> plus(R, lb), minus(R, lb);
        for (int z = 0; z < R; ++z) {
            const double d = (z == x ? 1.0 : 0.0) - 1.0 / R;
            plus[z] += h * d;
            minus[z] -= h * d;
        }
        const auto fp = oracle::migration_rhs(plus, p), fm = oracle::migration_rhs(minus, p);
        for (int i = 0; i < R; ++i) J[i][x] = (fp[i] - fm[i]) / (2 * h);
    }
    const auto fd = jacobian_fd(p);
    for (int k = 1; k < R; ++k) {
        const auto mu = oracle::rayleigh_fourier(J, k);
        EXPECT_LE(relative_error(mu.real(), fd.eigenvalues[k]), 1e-5);
        EXPECT_LE(relative_error(mu.real(), p.v * lb * omega_numeric(p, k)), 1e-5);
    }
}

TEST(JacobianFd, GeneralRegionCounts) {
    for (int R = 5; R <= 12; ++R) {
        const auto checks = spectral_checks(reference(R), {0.3, 1.0, 4.0});
        for (const auto& c : checks) EXPECT_TRUE(c.passed) << "R=" << R << " " << c.name << " " << c.value;
    }
}

TEST(CriticalTau, QuadraticRoot) {
    for (int R = 2; R <= 4; ++R) {
        const auto p = reference(R);
        const auto q = quad_coefficients(p);
        const auto tc = critical_tau(p, 1);
        ASSERT_TRUE(tc);
        EXPECT_DOUBLE_EQ(*tc, -q.B / q.A);
        EXPECT_NEAR(omega_numeric(p.with_tau(*tc), 1), 0.0, 1e-12);
    }
}

TEST(CriticalTau, FourRegionModeTwoHasNoBreakPoint) {
    EXPECT_FALSE(critical_tau(reference(4), 2));
    EXPECT_FALSE(critical_tau_bisection(reference(4), 2));
}

TEST(CriticalTau, BisectionMatchesClosedForm) {
    for (int R = 2; R <= 4; ++R) {
        const auto p = reference(R);
        const auto q = quad_coefficients(p);
        const auto tb = critical_tau_bisection(p, 1);
        ASSERT_TRUE(tb);
        EXPECT_NEAR(*tb, -q.B / q.A, 1e-10);
    }
}

TEST(CriticalTau, GeneralRegionsBracketSignChange) {
    for (int R = 5; R <= 10; ++R) {
        const auto p = reference(R);
        for (int k = 1; k < R; ++k) {
            const auto tc = critical_tau(p, k);
            if (!tc) {
                // no root: sign is constant over the bracket range
                EXPECT_GT(omega_numeric(p.with_tau(1e3), k), 0.0) << "R=" << R << " k=" << k;
                continue;
            }
            EXPECT_GT(omega_numeric(p.with_tau(*tc * 0.99), k), 0.0);
            EXPECT_LT(omega_numeric(p.with_tau(*tc * 1.01), k), 0.0);
            EXPECT_NEAR(*tc, *critical_tau(p, R - k), 1e-12 * *tc);
        }
    }
}

TEST(StabilityReport, Theorems) {
    {
        auto p = reference(2);
        p.tau = 2 * *critical_tau(p, 1);
        EXPECT_EQ(stability_report(p).classification, Stability::stable);
        p.tau = 0.5 * *critical_tau(reference(2), 1);
        EXPECT_EQ(stability_report(p).classification, Stability::unstable);
    }
    {
        auto p = reference(3);
        p.tau = 0.5 * *critical_tau(p, 1);
        EXPECT_EQ(stability_report(p).classification, Stability::unstable);
        p.tau = 2 * *critical_tau(reference(3), 1);
        EXPECT_EQ(stability_report(p).classification, Stability::stable);
    }
    for (double tau : {0.01, 0.5, 1.0, 5.0, 50.0})
        EXPECT_EQ(stability_report(reference(4, tau)).classification, Stability::unstable);
    EXPECT_EQ(stability_report(reference(3, 0.0)).classification, Stability::marginal);
}

TEST(StabilityReport, Contents) {
    const auto r = stability_report(reference(4, 1.0));
    EXPECT_EQ(r.R, 4);
    ASSERT_EQ(r.omega_modes.size(), 3u);
    ASSERT_EQ(r.critical_tau.size(), 3u);
    EXPECT_TRUE(r.quad_coeffs);
    EXPECT_TRUE(r.critical_tau[0]);
    EXPECT_FALSE(r.critical_tau[1]);
    EXPECT_FALSE(stability_report(reference(6)).quad_coeffs);
    EXPECT_THROW(stability_report(reference(1)), ParameterError);
}

TEST(SignPattern, RandomDrawsReport) {
    const auto rep = sample_sign_pattern(1000, 20240601);
    EXPECT_EQ(rep.draws, 1000);
    // Reported rather than asserted: the sign pattern is not proven for all parameters.
    RecordProperty("sign_failures", static_cast<int>(rep.failures.size()));
    for (const auto& f : rep.failures) std::cout << "sign failure: " << f.which << '\n';
}
