#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "projkit/isotropic.hpp"
#include "test_bodies.hpp"

using namespace projkit;
using fixtures::v3;
using std::numbers::pi;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Polytope box(double a, double b, double c) {
  std::vector<Vector> pts;
  for (int m = 0; m < 8; ++m) pts.push_back(v3(m & 1 ? a : -a, m & 2 ? b : -b, m & 4 ? c : -c));
  return Polytope::from_vertices(pts);
}

}  // namespace

TEST(Covariance, CubeAndBall) {
  const Matrix id = Matrix::Identity(3, 3);
  EXPECT_LE(max_abs(covariance(fixtures::cube()).matrix - 8.0 / 3.0 * id), 1e-12);
  const double axis = 4.0 * pi / 15.0;  // |B| / 5 per axis
  EXPECT_LE(max_abs(covariance(LpBall::make(3, 2.0)).matrix - axis * id), 1e-14);
  EXPECT_LE(max_abs(covariance(Body(ball(1.0))).matrix - axis * id), 1e-9);
}

TEST(Covariance, BoxClosedForm) {
  const auto c = covariance(box(1, 2, 5)).matrix;
  const double vol = 8.0 * 10.0;
  EXPECT_NEAR(c(0, 0), vol / 3.0, 1e-10);
  EXPECT_NEAR(c(1, 1), vol * 4.0 / 3.0, 1e-10);
  EXPECT_NEAR(c(2, 2), vol * 25.0 / 3.0, 1e-9);
  EXPECT_NEAR(c(0, 1), 0.0, 1e-10);
}

TEST(Covariance, CrossPolytopeAndLpBalls) {
  // slices x_1 = s of the cross-polytope have area 2 (1 - |s|)^2
  const double oracle = 2.0 * 2.0 * (1.0 / 3.0 - 2.0 / 4.0 + 1.0 / 5.0);
  EXPECT_NEAR(covariance(fixtures::cross_polytope()).matrix(0, 0), oracle, 1e-12);
  EXPECT_NEAR(covariance(LpBall::make(3, 1.0)).matrix(0, 0), oracle, 1e-12);
  EXPECT_NEAR(covariance(LpBall::make(3, HUGE_VAL)).matrix(0, 0), 8.0 / 3.0, 1e-12);
}

TEST(Covariance, Equivariance) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const auto p = fixtures::random_polytope(12, rng);
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) m.col(i) = fixtures::gaussian(3, rng);
    const Matrix lhs = covariance(linear_image(p, m)).matrix;
    const Matrix rhs = std::abs(m.determinant()) * m * covariance(p).matrix * m.transpose();
    EXPECT_LE(max_abs(lhs - rhs), 1e-9 * max_abs(rhs));
  }
}

TEST(Covariance, MonteCarloOracleAgreesWithExactPaths) {
  const Body cube = fixtures::cube();
  const auto mc = covariance_monte_carlo(cube, 200000, 3);
  EXPECT_GT(mc.standard_error, 0.0);
  EXPECT_LE(max_abs(mc.matrix - covariance(cube).matrix), 5.0 * mc.standard_error + 1e-3);

  const Body s = smooth(fixtures::cube(), 16);
  const auto exact = covariance(s);
  const auto sampled = covariance_monte_carlo(s, 200000, 4, 16, 4000);
  EXPECT_EQ(exact.method, "boundary integral");
  EXPECT_LE(max_abs(sampled.matrix - exact.matrix), 5.0 * sampled.standard_error + 1e-3 * max_abs(exact.matrix));
}

TEST(Covariance, MonteCarloIsDeterministic) {
  const Body b = LpBall::make(3, 1.5);
  const auto a = covariance_monte_carlo(b, 20000, 42);
  const auto c = covariance_monte_carlo(b, 20000, 42);
  EXPECT_EQ(a.matrix, c.matrix);
  EXPECT_NE(a.matrix, covariance_monte_carlo(b, 20000, 43).matrix);
}

TEST(Isotropize, CubeIsExact) {
  const auto r = isotropize(fixtures::cube());
  EXPECT_LE(r.certificate.covariance_residual, 1e-9);
  EXPECT_LE(r.certificate.volume_error, 1e-12);
  EXPECT_NEAR(r.certificate.isotropic_constant, std::sqrt(1.0 / 12.0), 1e-12);
  const Matrix& t = r.certificate.transform;
  EXPECT_LE(max_abs(t - t(0, 0) * Matrix::Identity(3, 3)), 1e-12);
  EXPECT_NEAR(t(0, 0), 0.5, 1e-12);
}

TEST(Isotropize, StretchedBoxRecovery) {
  const Body b = box(1, 2, 5);
  const auto r = isotropize(b);
  EXPECT_LE(r.certificate.covariance_residual, 1e-3);
  EXPECT_TRUE(r.certificate.valid());
  // T diag(1,2,5) must be a multiple of an orthogonal matrix
  Matrix s = Matrix::Zero(3, 3);
  s.diagonal() << 1, 2, 5;
  const Matrix m = r.certificate.transform * s;
  const Matrix g = m.transpose() * m;
  EXPECT_LE(max_abs(g - g(0, 0) * Matrix::Identity(3, 3)), 1e-9 * g(0, 0));
  EXPECT_NEAR(r.certificate.isotropic_constant, std::sqrt(1.0 / 12.0), 1e-9);
}

TEST(Isotropize, BallConstant) {
  const auto r = isotropize(LpBall::make(3, 2.0));
  EXPECT_NEAR(r.certificate.isotropic_constant, ball_isotropic_constant(3), 1e-12);
  // |B| r^3 = 1, L^2 = r^2 / 5
  const double radius = std::cbrt(3.0 / (4.0 * pi));
  EXPECT_NEAR(ball_isotropic_constant(3), radius / std::sqrt(5.0), 1e-15);
  const auto sm = isotropize(Body(ball(1.0)));
  EXPECT_NEAR(sm.certificate.isotropic_constant, ball_isotropic_constant(3), 1e-6);
  EXPECT_TRUE(sm.certificate.valid());
}

TEST(Isotropize, ZonotopesAboveBallAndIdempotent) {
  std::mt19937_64 rng(12);
  const double lb = ball_isotropic_constant(3);
  for (int t = 0; t < 10; ++t) {
    const auto z = fixtures::random_zonotope(12, rng);
    const auto r = isotropize(z);
    EXPECT_TRUE(r.certificate.valid());
    EXPECT_GE(r.certificate.isotropic_constant, lb);
    const auto again = isotropize(r.body);
    const Matrix& t2 = again.certificate.transform;
    EXPECT_LE(max_abs(t2.transpose() * t2 - Matrix::Identity(3, 3)), 1e-3);
  }
}

TEST(Isotropize, InvariantUnderUnimodularMaps) {
  std::mt19937_64 rng(13);
  const auto p = fixtures::random_polytope(10, rng);
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i) m.col(i) = fixtures::gaussian(3, rng);
  m /= std::cbrt(std::abs(m.determinant()));
  EXPECT_NEAR(isotropic_constant(p), isotropic_constant(linear_image(p, m)), 1e-9);
}
