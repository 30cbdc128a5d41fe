#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "projkit/harness.hpp"
#include "projkit/json_io.hpp"
#include "test_bodies.hpp"

using namespace projkit;

namespace {

std::map<std::string, double> quantities(const ExperimentReport& r) {
  std::map<std::string, double> m(r.quantities.begin(), r.quantities.end());
  m.insert(r.empirical_constants.begin(), r.empirical_constants.end());
  return m;
}

Zonotope axis_zonotope(double a, double b, double c) {
  return Zonotope::from_generators({fixtures::v3(a, 0, 0), fixtures::v3(0, b, 0), fixtures::v3(0, 0, c)});
}

// Smoothed cube as a zonoid: isotropic by symmetry, certified through the classifier.
const Body& smooth_cube_zonoid() {
  static const Body d = smooth(axis_zonotope(1, 1, 1), kDefaultDegree);
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Hyperplane inequalities with c_3

TEST(HyperplaneInequalities, BallSaturatesBoth) {
  const auto r = run_hyperplane_inequalities(LpBall::make(3, 2.0), HarnessOptions{});
  ASSERT_EQ(r.outcome, Outcome::pass);
  const auto q = quantities(r);
  const double v23 = std::pow(4.0 * std::numbers::pi / 3.0, 2.0 / 3.0);
  EXPECT_NEAR(q.at("volume_two_thirds"), v23, 1e-12);
  EXPECT_NEAR(c_n(3) * q.at("max_P"), v23, 1e-6);
  EXPECT_NEAR(c_n(3) * q.at("min_P"), v23, 1e-6);
}

TEST(HyperplaneInequalities, CubeExtremaMatchClosedForm) {
  const auto r = run_hyperplane_inequalities(fixtures::cube(), HarnessOptions{});
  ASSERT_EQ(r.outcome, Outcome::pass);
  const auto q = quantities(r);
  // P(xi) = 4 (|x| + |y| + |z|) for the cube [-1, 1]^3
  EXPECT_NEAR(q.at("max_P"), 4.0 * std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(q.at("min_P"), 4.0, 1e-12);
  EXPECT_EQ(r.checks.size(), 2u);
}

TEST(HyperplaneInequalities, RandomZonotopesPass) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 4; ++t) {
    const auto r = run_hyperplane_inequalities(fixtures::random_zonotope(4 + t, rng), HarnessOptions{});
    EXPECT_EQ(r.outcome, Outcome::pass) << t;
    EXPECT_EQ(r.checks.size(), 2u);
  }
}

TEST(HyperplaneInequalities, NonProjectionBodySkipsLowerBound) {
  const auto r = run_hyperplane_inequalities(LpBall::make(3, 1.5), HarnessOptions{});
  EXPECT_EQ(r.checks.size(), 1u);
  EXPECT_FALSE(r.note.empty());
}

// ---------------------------------------------------------------------------------------------
// Surface area against shadow perimeters

TEST(SurfaceAreaExperiment, BallConstants) {
  const auto r = run_surface_area(LpBall::make(3, 2.0), HarnessOptions{});
  ASSERT_EQ(r.outcome, Outcome::pass);
  const auto q = quantities(r);
  // S / (2 pi |B|^{1/3}) = 2 / (4 pi / 3)^{1/3}
  const double expect = 2.0 / std::cbrt(4.0 * std::numbers::pi / 3.0);
  EXPECT_NEAR(q.at("C_hat_max"), expect, 1e-9);
  EXPECT_NEAR(q.at("c_hat_min"), expect, 1e-9);
}

TEST(SurfaceAreaExperiment, CubePerimeterExtrema) {
  const auto r = run_surface_area(fixtures::cube(), HarnessOptions{});
  ASSERT_EQ(r.outcome, Outcome::pass);
  const auto q = quantities(r);
  // perimeter of the cube's shadow: 4 sum_i sqrt(1 - xi_i^2)
  EXPECT_NEAR(q.at("max_shadow_perimeter"), 4.0 * std::sqrt(6.0), 1e-8);
  EXPECT_NEAR(q.at("min_shadow_perimeter"), 8.0, 1e-12);
  EXPECT_NEAR(q.at("surface_area"), 24.0, 1e-12);
}

TEST(SurfaceAreaExperiment, ShadowPerimeterOracle) {
  std::mt19937_64 rng(3);
  const Body cube = fixtures::cube();
  for (int t = 0; t < 50; ++t) {
    const auto xi = fixtures::random_direction(3, rng);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) expect += 4.0 * std::sqrt(1.0 - xi.coords()[i] * xi.coords()[i]);
    EXPECT_NEAR(shadow_perimeter(cube, xi), expect, 1e-10);
  }
}

TEST(SurfaceAreaExperiment, NonIsotropicBodyIsRejected) {
  const auto r = run_surface_area(axis_zonotope(1, 1, 3), HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::hypothesis_violated);
}

// ---------------------------------------------------------------------------------------------
// Volume difference

TEST(VolumeDifference, LargerBodyPasses) {
  const auto& d = smooth_cube_zonoid();
  const auto r = run_volume_difference(scaled(d, 1.1), d, HarnessOptions{});
  ASSERT_EQ(r.outcome, Outcome::pass) << r.note;
  const auto q = quantities(r);
  EXPECT_GT(q.at("eps"), 0.0);
  EXPECT_GT(q.at("c_hat"), 0.0);
}

TEST(VolumeDifference, SmallerBodyIsNotApplicable) {
  const auto& d = smooth_cube_zonoid();
  EXPECT_EQ(run_volume_difference(scaled(d, 0.9), d, HarnessOptions{}).outcome, Outcome::not_applicable);
}

TEST(VolumeDifference, FlatBodyIsVacuous) {
  // large shadows but smaller volume than the ball
  const Body k = smooth(axis_zonotope(1, 1, 0.02), kDefaultDegree);
  const auto r = run_volume_difference(k, ball(1.0), HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::vacuous);
  EXPECT_LT(quantities(r).at("volume_gap"), 0.0);
}

TEST(VolumeDifference, RawBodiesAreRefused) {
  EXPECT_THROW(run_volume_difference(fixtures::cube(), smooth_cube_zonoid(), HarnessOptions{}), Error);
}

// ---------------------------------------------------------------------------------------------
// Stability for projection bodies

TEST(Stability, PassesForNearbyBodies) {
  const auto& d = smooth_cube_zonoid();
  const Body k = smooth(LpBall::make(3, 4.0, 1.05), kDefaultDegree);
  const auto r = run_stability(k, d, std::nullopt, HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::pass) << r.note;
}

TEST(Stability, ShrunkBodyChecksVolumeOrdering) {
  const auto& d = smooth_cube_zonoid();
  const auto r = run_stability(scaled(d, 0.9), d, std::nullopt, HarnessOptions{});
  ASSERT_EQ(r.outcome, Outcome::pass) << r.note;
  bool found = false;
  for (const auto& c : r.checks) found = found || c.name == "|K| <= |D|";
  EXPECT_TRUE(found);
}

TEST(Stability, NonProjectionBodyViolatesHypothesis) {
  const Body d = smooth(LpBall::make(3, 1.5), kDefaultDegree);
  const auto r = run_stability(ball(1.0), d, std::nullopt, HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::hypothesis_violated);
}

TEST(Stability, NonIsotropicBodyViolatesHypothesis) {
  const Body d = smooth(axis_zonotope(1, 1, 2), kDefaultDegree);
  const auto r = run_stability(ball(1.0), d, std::nullopt, HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::hypothesis_violated);
}

TEST(Stability, TooSmallEpsilonViolatesHypothesis) {
  const auto& d = smooth_cube_zonoid();
  const auto r = run_stability(scaled(d, 1.1), d, 1e-3, HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::hypothesis_violated);
}

// ---------------------------------------------------------------------------------------------
// Counterexamples

TEST(Counterexamples, L15BallPasses) {
  const auto r = run_counterexamples(LpBall::make(3, 1.5), HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::pass) << r.note;
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Counterexamples, ZonotopeIsNotApplicable) {
  std::mt19937_64 rng(2);
  const auto r = run_counterexamples(fixtures::random_zonotope(5, rng), HarnessOptions{});
  EXPECT_EQ(r.outcome, Outcome::not_applicable);
}

// ---------------------------------------------------------------------------------------------
// Reports and options

TEST(Reports, IdenticalUnderFixedSeed) {
  HarnessOptions opt;
  opt.seed = 42;
  const auto a = run_surface_area(fixtures::cube(), opt).to_json().dump();
  const auto b = run_surface_area(fixtures::cube(), opt).to_json().dump();
  EXPECT_EQ(a, b);
}

TEST(Reports, JsonAndCsvCarryEveryCheck) {
  auto r = run_hyperplane_inequalities(fixtures::cube(), HarnessOptions{});
  const auto j = r.to_json();
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["checks"].size(), r.checks.size());
  EXPECT_EQ(j["outcome"], "pass");
  const auto csv = r.csv_rows();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            r.checks.size() + r.quantities.size() + r.empirical_constants.size());
}

TEST(Reports, NonFiniteNumbersBecomeStrings) {
  ExperimentReport r;
  r.quantity("x", HUGE_VAL);
  EXPECT_EQ(r.to_json()["quantities"]["x"], "inf");
}

TEST(Reports, ConcludeNeedsChecks) {
  ExperimentReport r;
  r.outcome = Outcome::pass;
  r.conclude();
  EXPECT_EQ(r.outcome, Outcome::fail);
  ExperimentReport v;
  v.outcome = Outcome::vacuous;
  v.check("a", 0, 1, 0);
  v.conclude();
  EXPECT_EQ(v.outcome, Outcome::vacuous);
}

TEST(Tolerances, OverrideByName) {
  Tolerances t;
  t.override_from(nlohmann::json{{"parseval", 1e-4}, {"hyperplane", 0.0}});
  EXPECT_EQ(t.parseval, 1e-4);
  EXPECT_EQ(t.hyperplane, 0.0);
}

TEST(Tolerances, RejectsUnknownOrInvalid) {
  Tolerances t;
  EXPECT_THROW(t.override_from(nlohmann::json{{"nonsense", 1.0}}), Error);
  EXPECT_THROW(t.override_from(nlohmann::json{{"parseval", "big"}}), Error);
  EXPECT_THROW(t.override_from(nlohmann::json{{"parseval", -1.0}}), Error);
  EXPECT_THROW(t.override_from(nlohmann::json::array()), Error);
}

// ---------------------------------------------------------------------------------------------
// Body JSON

TEST(BodyJson, RoundTripsEveryType) {
  std::mt19937_64 rng(8);
  const std::vector<Body> bodies{fixtures::random_polytope(6, rng), fixtures::random_zonotope(4, rng),
                                 LpBall::make(3, 1.5, 2.0), LpBall::make(3, HUGE_VAL), ball(1.0, 8)};
  for (const auto& b : bodies) {
    const Body c = body_from_json(nlohmann::json::parse(body_to_json(b).dump()));
    EXPECT_EQ(describe(c), describe(b));
    for (int t = 0; t < 20; ++t) {
      const auto x = fixtures::random_direction(3, rng);
      EXPECT_NEAR(support(c, x), support(b, x), 1e-12);
    }
  }
}

TEST(BodyJson, SchemaExamples) {
  const auto cube = body_from_json(nlohmann::json::parse(
      R"({"type":"polytope","vertices":[[1,1,1],[1,1,-1],[1,-1,1],[1,-1,-1],[-1,1,1],[-1,1,-1],[-1,-1,1],[-1,-1,-1]]})"));
  EXPECT_NEAR(volume(cube), 8.0, 1e-12);
  const auto lp = body_from_json(nlohmann::json::parse(R"({"type":"lp_ball","dim":3,"p":1.5})"));
  EXPECT_TRUE(std::holds_alternative<LpBall>(lp));
  const auto s = body_from_json(nlohmann::json::parse(R"({"type":"smooth","L":4,"coeffs":{"0,0":3.5449077018110318}})"));
  EXPECT_NEAR(support(s, fixtures::v3(0, 0, 1)), 1.0, 1e-12);
  const auto tok = body_from_tokens({"lp_ball", "p=1.5", "dim=3"});
  EXPECT_EQ(describe(tok), describe(lp));
}

TEST(BodyJson, RejectsMalformedInput) {
  using nlohmann::json;
  EXPECT_THROW(body_from_json(json::parse(R"({"vertices":[[1,0,0]]})")), Error);
  EXPECT_THROW(body_from_json(json::parse(R"({"type":"cylinder"})")), Error);
  EXPECT_THROW(body_from_json(json::parse(R"({"type":"zonotope","generators":[]})")), Error);
  EXPECT_THROW(body_from_json(json::parse(R"({"type":"zonotope","generators":[[1,0,0],[1,0]]})")), Error);
  EXPECT_THROW(body_from_json(json::parse(R"({"type":"lp_ball","dim":3})")), Error);
  EXPECT_THROW(body_from_json(json::parse(R"({"type":"smooth","L":4,"coeffs":{"1,0":1.0}})")), Error);
  EXPECT_THROW(body_from_json(json::parse(R"({"type":"smooth","L":4,"coeffs":{"x":1.0}})")), Error);
  EXPECT_THROW(load_body("/nonexistent/body.json"), Error);
}
