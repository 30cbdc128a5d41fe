#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "projkit/zonoid.hpp"
#include "test_bodies.hpp"

using namespace projkit;
using std::numbers::pi;

namespace {

// |B^n| from lgamma, independent of the library's ball_volume
double log_ball(int n) { return 0.5 * n * std::log(pi) - std::lgamma(0.5 * n + 1.0); }

}  // namespace

TEST(Constants, CnFromGamma) {
  for (int n = 3; n <= 20; ++n) {
    const double oracle = std::exp((n - 1.0) / n * log_ball(n) - log_ball(n - 1));
    EXPECT_NEAR(c_n(n), oracle, 1e-13);
    EXPECT_GT(c_n(n), 1.0 / std::sqrt(std::exp(1.0)));
    EXPECT_LT(c_n(n), 1.0);
  }
  EXPECT_NEAR(c_n(3), std::pow(4.0 * pi / 3.0, 2.0 / 3.0) / pi, 1e-15);
  EXPECT_NEAR(c_n(3), 0.8271, 5e-5);
}

TEST(SupportTransform, BallIsConstant) {
  const auto t = support_transform(ball(1.0));
  for (const auto& x : fibonacci_sphere(100)) EXPECT_NEAR(evaluate(t, x), -8.0 * pi, 1e-9);
}

TEST(SupportTransform, ZonotopeHasNoPositiveExcursion) {
  std::mt19937_64 rng(21);
  const auto s = smooth(fixtures::box_plus_random(3, rng), 24);
  const auto c = is_projection_body(s);
  EXPECT_LE(c.excursion, 1e-6);
}

TEST(SupportTransform, L15HasPositiveExcursion) {
  const auto c = is_projection_body(smooth(LpBall::make(3, 1.5), 24));
  EXPECT_GE(c.excursion, 1e-3);
}

TEST(Classification, LpFamily) {
  for (double p : {2.0, 3.0, 4.0, HUGE_VAL})
    EXPECT_EQ(is_projection_body(smooth(LpBall::make(3, p), 24)).verdict, ZonoidVerdict::certified_yes) << p;
  for (double p : {1.2, 1.5}) {
    const auto c = is_projection_body(smooth(LpBall::make(3, p), 24));
    ASSERT_EQ(c.verdict, ZonoidVerdict::certified_no) << p;
    ASSERT_TRUE(c.witness.has_value());
    EXPECT_GE(c.witness->radius, 2.0 * c.grid_spacing);
    EXPECT_GT(c.witness->grid_nodes, 0u);
  }
}

TEST(Classification, WitnessCapIsPositive) {
  const auto s = smooth(LpBall::make(3, 1.2), 24);
  const auto c = is_projection_body(s);
  ASSERT_TRUE(c.witness.has_value());
  const auto t = support_transform(s);
  // independent check on a random sample of the cap
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Vector3d c0 = c.witness->center;
  const auto [a, b] = detail::plane_frame(c0);
  for (int k = 0; k < 500; ++k) {
    const double rho = c.witness->radius * std::sqrt(u(rng)), phi = 2.0 * pi * u(rng);
    const Eigen::Vector3d x = std::cos(rho) * c0 + std::sin(rho) * (std::cos(phi) * a + std::sin(phi) * b);
    EXPECT_GT(evaluate(t, x), c.tol * c.sup_norm);
  }
}

TEST(Classification, ZonotopesNeverCertifiedNo) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 5; ++t) {
    const auto c = is_projection_body(smooth(fixtures::random_zonotope(6, rng), 24));
    EXPECT_NE(c.verdict, ZonoidVerdict::certified_no);
  }
}

TEST(CurvatureTransform, BallAnchor) {
  const auto t = curvature_transform(ball(1.0));
  for (const auto& x : fibonacci_sphere(100)) EXPECT_NEAR(evaluate(t, x), -pi * pi, 1e-9);
}

TEST(CurvatureTransform, IdentityBandOnSmoothBodies) {
  std::mt19937_64 rng(24);
  const std::vector<SmoothBody> bodies{smooth(fixtures::cube(), 24), smooth(fixtures::random_zonotope(5, rng), 24),
                                       smooth(LpBall::make(3, 1.5), 24), smooth(LpBall::make(3, 3.0), 24)};
  for (const auto& b : bodies) EXPECT_LE(curvature_identity(b, 500).relative_band, 0.02);
}

TEST(CurvatureTransform, SmoothedCubeAgainstCubeShadow) {
  const auto s = smooth(fixtures::cube(), 24);
  const Body cube = fixtures::cube();
  const auto r = curvature_identity_against(s, [&](const Direction& xi) { return projection_function(cube, xi); }, 500);
  // uniform 2% of -pi P_cube; the damping needed for convexity at this degree costs more
  EXPECT_LE(r.sup_residual, 0.02 * pi * r.sup_projection);
}

TEST(IntegralLowerBound, BallEquality) {
  for (double r : {1.0, 2.0}) {
    const auto rec = integral_lower_bound(ball(r));
    EXPECT_NEAR(rec.lhs, -32.0 * pi * pi * r, 1e-9 * 32.0 * pi * pi * r);
    EXPECT_NEAR(rec.slack, 0.0, 1e-9 * std::abs(rec.rhs));
    EXPECT_TRUE(rec.holds);
  }
}

TEST(IntegralLowerBound, CubeAndZonotopes) {
  EXPECT_LT(integral_lower_bound(smooth(fixtures::cube(), 24)).slack, 0.0);
  std::mt19937_64 rng(25);
  for (int t = 0; t < 20; ++t) {
    const auto rec = integral_lower_bound(smooth(fixtures::random_zonotope(4 + t % 5, rng), 16));
    EXPECT_LE(rec.slack, 0.0);
  }
}

TEST(MeanWidthBound, RecordsPositiveRatio) {
  const double v = 4.0 * pi / 3.0;
  const auto b = mean_width_bound(ball(std::cbrt(1.0 / v)));
  EXPECT_NEAR(b.volume, 1.0, 1e-9);
  EXPECT_NEAR(b.isotropic_constant, ball_isotropic_constant(3), 1e-8);
  // mean width of the volume-one ball is its radius
  EXPECT_NEAR(b.mean_width, std::cbrt(1.0 / v), 1e-12);
  EXPECT_GT(b.ratio, 0.0);
  const auto c = mean_width_bound(smooth(fixtures::cube(0.5), 24));
  EXPECT_GT(c.ratio, 0.0);
  const auto ellipsoid = SmoothBody::from_expansion(expand_function(
      [](const Eigen::Vector3d& x) { return std::sqrt(x[0] * x[0] + 4.0 * x[1] * x[1] + x[2] * x[2]); }, 16));
  EXPECT_THROW(mean_width_bound(ellipsoid), Error);
}
