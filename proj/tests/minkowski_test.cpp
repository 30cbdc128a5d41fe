#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "projkit/minkowski.hpp"
#include "test_bodies.hpp"

using namespace projkit;
using fixtures::v3;
using std::numbers::pi;

namespace {

double max_support_error(const AtomicSolution& s, const Body& body) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.normals.size(); ++i)
    e = std::max(e, std::abs(s.support[i] - support(body, Vector(s.normals[i]))));
  return e;
}

AtomicMeasure measure(std::vector<Vector> normals, std::vector<double> areas) {
  AtomicMeasure m;
  m.dimension = 3;
  m.normals = std::move(normals);
  m.areas = std::move(areas);
  return m;
}

}  // namespace

TEST(AtomicSolver, CubeRoundTrip) {
  const auto cube = fixtures::cube();
  const auto s = solve_minkowski(surface_measure(cube));
  EXPECT_LE(s.max_area_error, 1e-6);
  EXPECT_LE(max_support_error(s, cube), 1e-6);
  EXPECT_NEAR(s.polytope().volume(), 8.0, 1e-6);
}

TEST(AtomicSolver, CrossPolytopeRoundTrip) {
  // eight equilateral faces of side sqrt 2 at distance 1 / sqrt 3
  std::vector<Vector> normals;
  for (int m = 0; m < 8; ++m) normals.push_back(v3(m & 1 ? 1 : -1, m & 2 ? 1 : -1, m & 4 ? 1 : -1) / std::sqrt(3.0));
  const auto s = solve_minkowski(measure(normals, std::vector<double>(8, std::sqrt(3.0) / 2.0)));
  EXPECT_LE(s.max_area_error, 1e-6);
  for (double h : s.support) EXPECT_NEAR(h, 1.0 / std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(s.polytope().volume(), 4.0 / 3.0, 1e-6);
}

TEST(AtomicSolver, RandomPolytopesRoundTrip) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    const auto p = fixtures::random_polytope(10, rng);
    const auto s = solve_minkowski(surface_measure(p));
    EXPECT_LE(s.max_area_error, 1e-6);
    EXPECT_LE(max_support_error(s, p), 1e-6);
  }
}

TEST(AtomicSolver, RejectsInvalidMeasures) {
  std::vector<Vector> axes{v3(1, 0, 0), v3(-1, 0, 0), v3(0, 1, 0), v3(0, -1, 0), v3(0, 0, 1), v3(0, 0, -1)};
  // antipodal weights differ, so the measure is not centred
  EXPECT_THROW(solve_minkowski(measure(axes, {4, 5, 4, 4, 4, 4})), Error);
  // planar normals do not span R^3
  EXPECT_THROW(solve_minkowski(measure({axes[0], axes[1], axes[2], axes[3]}, {1, 1, 1, 1})), Error);
  // a normal without antipode
  EXPECT_THROW(solve_minkowski(measure({axes[0], axes[2], axes[3], axes[4], axes[5]}, {1, 1, 1, 1, 1})), Error);
  EXPECT_THROW(solve_minkowski(measure(axes, {4, 4, 0, 0, 4, 4})), Error);
}

TEST(DensitySolver, ConstantDensityGivesBall) {
  for (double r : {1.0, 1.5}) {
    const auto s = body_from_curvature(HarmonicExpansion::constant(4, r * r), 16);
    double err = 0.0;
    for (const auto& x : fibonacci_sphere(2000)) err = std::max(err, std::abs(s.body.support(x) - r));
    EXPECT_LE(err, 1e-3 * r) << r;
    EXPECT_NEAR(s.body.volume(), 4.0 * pi / 3.0 * r * r * r, 1e-2 * r * r * r);
  }
}

TEST(DensitySolver, RecoversSmoothBody) {
  const auto k = smooth(LpBall::make(3, 1.5), 24);
  const auto s = body_from_curvature(k.curvature().density, 24);
  EXPECT_LE(s.density_l2_error, 1e-3);
  EXPECT_NEAR(s.body.volume(), k.volume(), 1e-4 * k.volume());
  double err = 0.0;
  for (const auto& x : fibonacci_sphere(2000)) err = std::max(err, std::abs(s.body.support(x) - k.support(x)));
  EXPECT_LE(err, 1e-3);
}

TEST(DensitySolver, RejectsNonPositiveDensity) {
  auto f = HarmonicExpansion::constant(4, 1.0);
  f.coeffs[harmonic_index(2, 0)] = 5.0;
  EXPECT_THROW(body_from_curvature(f, 8), Error);
}

TEST(Counterexample, ZonotopeIsRefused) {
  std::mt19937_64 rng(32);
  const auto z = smooth(fixtures::box_plus_random(3, rng), 24);
  try {
    construct_shephard_counterexample(z);
    FAIL() << "zonoid accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::precondition);
  }
}

class CounterexampleL15 : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    k_ = new SmoothBody(smooth(LpBall::make(3, 1.5), 24));
    CounterexampleOptions o;
    stab_ = new CounterexampleResult(construct_shephard_counterexample(*k_, o));
    o.mode = CounterexampleMode::separation;
    sep_ = new CounterexampleResult(construct_shephard_counterexample(*k_, o));
  }
  static void TearDownTestSuite() {
    delete k_;
    delete stab_;
    delete sep_;
  }
  static SmoothBody* k_;
  static CounterexampleResult* stab_;
  static CounterexampleResult* sep_;
};
SmoothBody* CounterexampleL15::k_ = nullptr;
CounterexampleResult* CounterexampleL15::stab_ = nullptr;
CounterexampleResult* CounterexampleL15::sep_ = nullptr;

TEST_F(CounterexampleL15, BumpIsNonNegativeAndConcentratedInOmega) {
  const auto& t = stab_->trace;
  EXPECT_GE(t.bump_min, 0.0);
  EXPECT_GE(t.bump_max_in_omega, 0.99);
  EXPECT_GT(t.parseval_pairing, 0.0);
  EXPECT_GE(t.witness.radius, 0.0);
}

TEST_F(CounterexampleL15, StabilityOrdering) {
  const auto& t = stab_->trace;
  EXPECT_GT(t.min_curvature_d, 0.0);
  EXPECT_LE(t.ordering_violation, 1e-8);
  EXPECT_LE(t.identity_residual, 1e-10);
  // independent check of P_D <= P_K <= P_D + eps on fresh directions
  const auto pd = projection_expansion(DensityMeasure{stab_->density, t.min_curvature_d});
  std::mt19937_64 rng(33);
  for (int i = 0; i < 500; ++i) {
    const auto xi = fixtures::random_direction(3, rng);
    const double a = projection_shadow(*k_, xi), b = evaluate(pd, xi.coords().head<3>());
    EXPECT_LE(b - a, 1e-8);
    EXPECT_LE(a - b - stab_->epsilon, 1e-8);
  }
}

TEST_F(CounterexampleL15, StabilityVolumeGap) {
  EXPECT_LE(stab_->trace.density_l2_error, 1e-2);
  EXPECT_GE(stab_->volume_gap(), 0.95 * c_n(3) * stab_->epsilon);
  // the bound on |D| stays close to the reconstruction it is built from
  EXPECT_NEAR(stab_->trace.volume_d_bound, stab_->trace.volume_d_smooth, 1e-3 * stab_->trace.volume_d_smooth);
}

TEST_F(CounterexampleL15, SeparationOrderingAndReversedGap) {
  const auto& t = sep_->trace;
  EXPECT_LE(t.ordering_violation, 1e-8);
  EXPECT_LE(t.identity_residual, 1e-10);
  // with P_K below P_D the volume gap changes sign
  EXPECT_LT(sep_->volume_gap(), 0.0);
}
