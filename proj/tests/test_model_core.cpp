#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "racetrack/geometry.hpp"
#include "racetrack/params.hpp"
#include "racetrack/population.hpp"

using namespace racetrack;
using std::numbers::pi;

TEST(ArcDistance, KnownRingDistances) {
    EXPECT_DOUBLE_EQ(arc_distance(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(arc_distance(0, 7), 0.0);
    EXPECT_DOUBLE_EQ(arc_distance(1, 2), pi);
    EXPECT_DOUBLE_EQ(arc_distance(1, 4), pi / 2);
    EXPECT_DOUBLE_EQ(arc_distance(2, 4), pi);
    EXPECT_DOUBLE_EQ(arc_distance(3, 4), pi / 2);
    EXPECT_DOUBLE_EQ(arc_distance(1, 3), 2 * pi / 3);
    EXPECT_DOUBLE_EQ(arc_distance(2, 3), 2 * pi / 3);
}

TEST(ArcDistance, RejectsDegenerateRing) {
    EXPECT_THROW(arc_distance(0, 1), std::invalid_argument);
    EXPECT_THROW(arc_distance(0, 0), std::invalid_argument);
    EXPECT_THROW(arc_distance(4, 4), std::out_of_range);
    EXPECT_THROW(arc_distance(-1, 4), std::out_of_range);
}

TEST(ArcDistance, SymmetricAndMatchesAngularOracle) {
    for (int R = 2; R <= 40; ++R) {
        for (int m = 1; m < R; ++m) EXPECT_DOUBLE_EQ(arc_distance(m, R), arc_distance(R - m, R));
        for (int x = 0; x < R; ++x)
            for (int y = 0; y < R; ++y) EXPECT_NEAR(ring_distance(x, y, R), oracle::arc(x, y, R), 1e-12);
    }
}

TEST(ArcDistance, RingSums) {
    EXPECT_NEAR(total_arc_distance(2), pi, 1e-15);
    EXPECT_NEAR(total_arc_distance(3), 4 * pi / 3, 1e-15);
    EXPECT_NEAR(total_arc_distance(4), 2 * pi, 1e-15);
}

TEST(ValidateParams, ReferenceSetIsValid) {
    ModelParams p;  // a=b=c=F=tau=v=Phi=Lambda=1, R=2
    EXPECT_TRUE(collect_violations(p).empty());
    EXPECT_NO_THROW(validate_params(p));
}

TEST(ValidateParams, ZeroCouplingRejectedUnlessDecoupledMode) {
    ModelParams p;
    p.c = 0.0;
    const auto v = collect_violations(p);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "c must be > 0");
    EXPECT_TRUE(collect_violations(p, ValidationMode::allow_decoupled_demand).empty());
    p.c = -1.0;
    EXPECT_FALSE(collect_violations(p, ValidationMode::allow_decoupled_demand).empty());
}

TEST(ValidateParams, SingleRegionRejected) {
    ModelParams p;
    p.R = 1;
    const auto v = collect_violations(p);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "R must be >= 2");
}

TEST(ValidateParams, ReportsEveryViolation) {
    ModelParams p;
    p.a = -1;
    p.b = 0;
    p.F = std::nan("");
    p.tau = -0.5;
    p.v = 0;
    p.Phi = -1;
    p.Lambda = 0;
    p.R = 0;
    try {
        validate_params(p);
        FAIL() << "expected ParameterError";
    } catch (const ParameterError& e) {
        EXPECT_EQ(e.violations().size(), 8u);
    }
}

TEST(ValidateParams, BoundaryValuesAllowed) {
    ModelParams p;
    p.tau = 0.0;
    p.Phi = 0.0;
    EXPECT_TRUE(collect_violations(p).empty());
}

TEST(Population, HomogeneousState) {
    ModelParams p;
    p.R = 5;
    p.Lambda = 2.5;
    const auto s = homogeneous_state(p);
    ASSERT_EQ(s.regions(), 5);
    for (double l : s.lambda) EXPECT_DOUBLE_EQ(l, 0.5);
    EXPECT_TRUE(population_violations(s, p).empty());
}

TEST(Population, InvariantsDetected) {
    ModelParams p;
    p.R = 3;
    EXPECT_FALSE(population_violations({{0.5, 0.5}, 0}, p).empty());          // wrong length
    EXPECT_FALSE(population_violations({{0.5, 0.6, -0.1}, 0}, p).empty());    // negative
    EXPECT_FALSE(population_violations({{0.4, 0.4, 0.4}, 0}, p).empty());     // wrong total
    EXPECT_FALSE(population_violations({{0.0, 0.0, 0.0}, 0}, p).empty());
    EXPECT_TRUE(population_violations({{1.0, 0.0, 0.0}, 0}, p).empty());
    EXPECT_THROW(check_population({{0.4, 0.4, 0.4}, 0}, p), PopulationError);
}

TEST(Population, CosinePerturbation) {
    ModelParams p;
    p.R = 6;
    const auto s = cosine_perturbation(p, 1, 0.01);
    EXPECT_NEAR(s.total(), p.Lambda, 1e-15);
    EXPECT_NEAR(s.lambda[0], p.mean_mobile() + 0.01, 1e-15);
    EXPECT_NEAR(s.lambda[3], p.mean_mobile() - 0.01, 1e-15);
    EXPECT_THROW(cosine_perturbation(p, 1, 1.0), PopulationError);
    EXPECT_THROW(cosine_perturbation(p, 1, -1e-3), PopulationError);
}

TEST(Population, RandomPerturbationIsDeterministicAndConserving) {
    ModelParams p;
    p.R = 7;
    const auto a = random_perturbation(p, 1e-3, 42);
    const auto b = random_perturbation(p, 1e-3, 42);
    const auto c = random_perturbation(p, 1e-3, 43);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_NE(a.lambda, c.lambda);
    EXPECT_NEAR(a.total(), p.Lambda, 1e-15);
    double peak = 0;
    for (double l : a.lambda) peak = std::max(peak, std::abs(l - p.mean_mobile()));
    EXPECT_NEAR(peak, 1e-3, 1e-15);
}

TEST(Population, RotationShiftsForward) {
    const PopulationState s{{1, 2, 3, 4}, 0.5};
    const auto r = rotated(s, 1);
    EXPECT_EQ(r.lambda, (std::vector<double>{4, 1, 2, 3}));
    EXPECT_EQ(rotated(s, -1).lambda, (std::vector<double>{2, 3, 4, 1}));
    EXPECT_EQ(rotated(s, 4).lambda, s.lambda);
    EXPECT_EQ(r.time, 0.5);
}
