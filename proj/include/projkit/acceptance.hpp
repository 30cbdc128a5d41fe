#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "projkit/harness.hpp"
#include "projkit/isotropic.hpp"
#include "projkit/minkowski.hpp"
#include "projkit/projections.hpp"
#include "projkit/zonoid.hpp"

namespace projkit {

// ---------------------------------------------------------------------------------------------
// Random test bodies

namespace samples {

inline Vector gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline Eigen::Vector3d direction(std::mt19937_64& rng) { return gaussian(3, rng).normalized(); }

/// Symmetric hull of `count` Gaussian points and their negatives.
inline Polytope polytope(int count, std::mt19937_64& rng) {
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i) {
    Vector v = gaussian(3, rng);
    pts.push_back(v);
    pts.push_back(-v);
  }
  return Polytope::from_vertices(std::move(pts));
}

inline Zonotope zonotope(int count, std::mt19937_64& rng) {
  std::vector<Vector> gens;
  for (int i = 0; i < count; ++i) gens.push_back(gaussian(3, rng));
  return Zonotope::from_generators(std::move(gens));
}

inline Polytope box(double a, double b, double c) {
  std::vector<Vector> pts;
  for (int m = 0; m < 8; ++m) {
    Vector v(3);
    v << (m & 1 ? a : -a), (m & 2 ? b : -b), (m & 4 ? c : -c);
    pts.push_back(v);
  }
  return Polytope::from_vertices(std::move(pts));
}

inline Polytope cube(double r = 1.0) { return box(r, r, r); }

}  // namespace samples

// ---------------------------------------------------------------------------------------------
// Criteria

struct CriterionResult {
  int index = 0;
  std::string title;
  ExperimentReport report;
  double seconds = 0.0;  // wall time, kept out of the report
  double budget = 0.0;

  bool within_budget() const { return seconds <= budget; }
  bool pass() const { return report.passed() && within_budget(); }
};

namespace acceptance {

inline std::mt19937_64 stream(std::uint64_t seed, int index) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(s);
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// 1: shadow, Cauchy and determinant evaluators agree on random polytopes and zonotopes.
inline void evaluators(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions&) {
  double poly = 0.0, zono = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto p = samples::polytope(8 + t % 8, rng);
    const auto z = samples::zonotope(3 + t % 8, rng);
    const auto mp = surface_measure(p), mz = surface_measure(z);
    for (int k = 0; k < 200; ++k) {
      const Direction xi(Vector(samples::direction(rng)));
      const double a = projection_shadow(p, xi), b = projection_cauchy(mp, xi);
      poly = std::max(poly, relative(b, a));
      const double c = projection_shadow(z.polytope(), xi), d = projection_cauchy(mz, xi), e = projection_determinant(z, xi);
      zono = std::max({zono, relative(d, c), relative(e, c)});
    }
  }
  r.check("polytopes: max relative |shadow - Cauchy|", poly, 0.0, 1e-9);
  r.check("zonotopes: max relative disagreement of shadow, Cauchy, determinant", zono, 0.0, 1e-9);
}

/// 2: double transform, degree-zero anchors and the Parseval pairing at L = 24.
inline void fourier_suite(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  using std::numbers::pi;
  const int L = 24;
  const double scale = std::pow(2.0 * pi, 3);
  std::normal_distribution<double> g;
  auto f = HarmonicExpansion::zero(L);
  for (auto& c : f.coeffs) c = g(rng);
  const auto twice = homogeneous_fourier(homogeneous_fourier(f, HomogeneousDegree::support()), HomogeneousDegree::curvature(3));
  double worst = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) worst = std::max(worst, relative(twice.coeffs[i], scale * f.coeffs[i]));
  r.check("double transform: max relative |coefficient - (2pi)^3 coefficient|", worst, 0.0, 1e-9);
  const auto one = HarmonicExpansion::constant(L, 1.0);
  const auto c1 = homogeneous_fourier(one, HomogeneousDegree::curvature(3));
  const auto s1 = homogeneous_fourier(one, HomogeneousDegree::support());
  double ca = 0.0, sa = 0.0;
  for (const auto& x : fibonacci_sphere(200)) {
    ca = std::max(ca, std::abs(evaluate(c1, x) + pi * pi));
    sa = std::max(sa, std::abs(evaluate(s1, x) + 8.0 * pi));
  }
  r.check("anchor |(1 r^-4)^ + pi^2|", ca, 0.0, 1e-9);
  r.check("anchor |(1 r)^ + 8 pi|", sa, 0.0, 1e-9);
  // smooth pairs: transforms integrated on a rule against the direct pairing by coefficients
  const std::vector<SmoothBody> bodies{ball(1.0, L), smooth(samples::cube(), L), smooth(samples::zonotope(5, rng), L),
                                       smooth(LpBall::make(3, 1.5), L), smooth(LpBall::make(3, 3.0), L)};
  double gap = 0.0;
  for (std::size_t a = 0; a < bodies.size(); ++a)
    for (std::size_t b = 0; b < bodies.size(); ++b) {
      const auto& h = bodies[a].support_expansion();
      const auto& fd = bodies[b].curvature().density;
      double direct = 0.0;
      for (std::size_t i = 0; i < std::min(h.coeffs.size(), fd.coeffs.size()); ++i) direct += h.coeffs[i] * fd.coeffs[i];
      const auto& q = cached_quadrature(3, h.max_degree + fd.max_degree + 2);
      gap = std::max(gap, spherical_parseval_quadrature(support_transform(bodies[a]), curvature_transform(bodies[b]),
                                                        direct, q).relative_gap);
    }
  r.check("Parseval: max relative gap over smooth pairs", gap, 0.0, opt.tol.parseval);
}

/// 3: curvature transform against the shadow areas of the smooth body itself.
inline void curvature_identity_suite(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  const int L = 24;
  const std::vector<std::pair<std::string, SmoothBody>> bodies{
      {"smoothed cube", smooth(samples::cube(), L)},
      {"smoothed zonotope 1", smooth(samples::zonotope(5, rng), L)},
      {"smoothed zonotope 2", smooth(samples::zonotope(8, rng), L)},
      {"l_1.5 ball", smooth(LpBall::make(3, 1.5), L)},
      {"l_3 ball", smooth(LpBall::make(3, 3.0), L)}};
  for (const auto& [name, b] : bodies) {
    const auto rec = curvature_identity(b, opt.grid);
    r.check(name + ": sup|(f r^-4)^ + pi P| / sup P", rec.relative_band, 0.0, 0.02);
  }
}

/// 4: zonoid classification of the l_p family and of random zonotopes.
inline void classification(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  const int L = 24;
  const auto z = zonoid_options(opt);
  auto verdict = [&](const SmoothBody& s) { return is_projection_body(s, z); };
  for (double p : {2.0, 3.0, 4.0, HUGE_VAL}) {
    const auto c = verdict(smooth(LpBall::make(3, p), L));
    r.check("p = " + detail::sci(p) + ": not certified_yes", c.verdict == ZonoidVerdict::certified_yes ? 0.0 : 1.0, 0.0, 0.0);
  }
  for (double p : {1.2, 1.5}) {
    const auto c = verdict(smooth(LpBall::make(3, p), L));
    const bool ok = c.verdict == ZonoidVerdict::certified_no && c.witness && c.witness->radius >= z.cap_factor * c.grid_spacing;
    r.check("p = " + detail::sci(p) + ": not certified_no with a cap witness", ok ? 0.0 : 1.0, 0.0, 0.0);
    if (c.witness) r.quantity("witness_radius_p_" + std::to_string(p), c.witness->radius);
  }
  for (int t = 0; t < 5; ++t) {
    const auto c = verdict(smooth(samples::zonotope(4 + t, rng), L));
    r.check("zonotope " + std::to_string(t) + ": certified_no", c.verdict == ZonoidVerdict::certified_no ? 1.0 : 0.0, 0.0, 0.0);
  }
}

/// 5: the integral lower bound on smooth bodies, ball equality and the range of c_n.
inline void integral_bound(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  const int L = opt.degree;
  std::vector<SmoothBody> bodies{smooth(samples::cube(), L)};
  for (double p : {1.2, 1.5, 3.0, 4.0, HUGE_VAL}) bodies.push_back(smooth(LpBall::make(3, p), L));
  for (int t = 0; t < 14; ++t) bodies.push_back(smooth(samples::zonotope(3 + t % 6, rng), L));
  for (int t = 0; t < 10; ++t) bodies.push_back(smooth(samples::polytope(6 + t, rng), L));
  double worst = -HUGE_VAL;
  for (const auto& b : bodies) {
    const auto rec = integral_lower_bound(b);
    worst = std::max(worst, rec.slack / std::abs(rec.rhs));
  }
  r.quantity("bodies", static_cast<double>(bodies.size()));
  r.check("max relative slack over 30 smooth bodies", worst, 0.0, 0.0);
  const auto eq = integral_lower_bound(ball(1.0, L));
  r.check("ball: relative |slack|", std::abs(eq.slack) / std::abs(eq.rhs), 0.0, 1e-9);
  // c_n from log-Gamma, independent of the library's ball volumes
  auto log_ball = [](int n) { return 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0); };
  double lo = HUGE_VAL, hi = -HUGE_VAL, dev = 0.0;
  for (int n = 3; n <= 20; ++n) {
    const double oracle = std::exp((n - 1.0) / n * log_ball(n) - log_ball(n - 1));
    dev = std::max(dev, std::abs(c_n(n) - oracle));
    lo = std::min(lo, oracle);
    hi = std::max(hi, oracle);
  }
  r.check("|c_n - Gamma formula|, n = 3..20", dev, 0.0, 1e-12);
  r.check("1/sqrt(e) < min c_n", 1.0 / std::sqrt(std::exp(1.0)), lo, -1e-15);
  r.check("max c_n < 1", hi, 1.0, -1e-15);
}

/// 6: discrete and density Minkowski problems.
inline void minkowski_round_trip(ExperimentReport& r, std::mt19937_64&, const HarnessOptions& opt) {
  auto support_error = [](const AtomicSolution& s, const Body& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.normals.size(); ++i) {
      const double want = support(b, Vector(s.normals[i]));
      e = std::max(e, std::abs(s.support[i] - want) / want);
    }
    return e;
  };
  const Body cube = samples::cube();
  const auto sc = solve_minkowski(surface_measure(std::get<Polytope>(cube)));
  r.check("cube: per-atom relative area error", sc.max_area_error, 0.0, 1e-6);
  r.check("cube: relative support error", support_error(sc, cube), 0.0, 1e-6);
  std::vector<Vector> oct;
  for (int i = 0; i < 3; ++i) {
    oct.push_back(Vector::Unit(3, i));
    oct.push_back(-Vector::Unit(3, i));
  }
  const Body cross = Polytope::from_vertices(oct);
  const auto sx = solve_minkowski(surface_measure(std::get<Polytope>(cross)));
  r.check("cross-polytope: per-atom relative area error", sx.max_area_error, 0.0, 1e-6);
  r.check("cross-polytope: relative support error", support_error(sx, cross), 0.0, 1e-6);
  const auto ball_sol = body_from_curvature(HarmonicExpansion::constant(4, 1.0), opt.degree);
  double h_err = 0.0;
  for (const auto& x : fibonacci_sphere(opt.grid)) h_err = std::max(h_err, std::abs(ball_sol.body.support(Vector(x)) - 1.0));
  r.check("f = 1: max |h - 1|", h_err, 0.0, 1e-3);
  r.quantity("ball_density_l2_error", ball_sol.density_l2_error);
}

/// 7: the stability counterexample for the smoothed l_1.5 ball.
inline void stability_counterexample(ExperimentReport& r, std::mt19937_64&, const HarnessOptions& opt) {
  const auto k = smooth(LpBall::make(3, 1.5), 24);
  auto co = counterexample_options(opt);
  co.mode = CounterexampleMode::stability;
  const auto ce = construct_shephard_counterexample(k, co);
  const auto& t = ce.trace;
  const auto pd = projection_expansion(DensityMeasure{ce.density, t.min_curvature_d});
  const auto pk = projection_expansion(k.curvature());
  auto diff = [&](const Eigen::Vector3d& x) { return evaluate(pk, x) - evaluate(pd, x); };
  const auto hi = sphere_extremum(diff, true, opt), lo = sphere_extremum(diff, false, opt);
  const double eps = ce.epsilon, c3 = c_n(3);
  const double violation = std::max({t.ordering_violation, -lo.value, hi.value - eps});
  r.quantity("eps", eps);
  r.quantity("delta", ce.delta);
  r.quantity("grid_directions", static_cast<double>(t.directions));
  r.quantity("volume_K", t.volume_k);
  r.quantity("volume_D_bound", t.volume_d_bound);
  r.quantity("density_l2_error", t.density_l2_error);
  r.check("max violation of P_D <= P_K <= P_D + eps", violation, 0.0, 1e-8);
  r.check("|D|^{2/3} + 0.95 c_3 eps <= |K|^{2/3}", std::cbrt(t.volume_d_bound * t.volume_d_bound) + 0.95 * c3 * eps,
          std::cbrt(t.volume_k * t.volume_k), 0.0);
  r.constant("gap_over_c3_eps", ce.volume_gap() / (c3 * eps));
}

/// 8: derivative step of the surface inequality and the cube's parallel volume.
inline void derivative_step(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  std::vector<std::pair<std::string, Body>> bodies{{"ball", LpBall::make(3, 2.0)}, {"cube", samples::cube()}};
  for (int t = 0; t < 3; ++t) bodies.emplace_back("zonotope " + std::to_string(t), isotropize(samples::zonotope(5 + t, rng)).body);
  for (const auto& [name, b] : bodies) {
    const auto rep = run_surface_area(b, opt);
    for (const auto& c : rep.checks) r.checks.push_back({name + ": " + c.name, c.lhs, c.rhs, c.tolerance, c.pass});
    if (rep.outcome != Outcome::pass) r.check(name + ": outcome " + to_string(rep.outcome), 1.0, 0.0, 0.0);
    for (const auto& [k, v] : rep.empirical_constants) r.constant(name + " " + k, v);
  }
  const double closed = 8.0 + 24.0 + 6.0 * std::numbers::pi + 4.0 * std::numbers::pi / 3.0;
  r.check("cube: relative |Steiner(1) - closed form|", relative(steiner_profile(samples::cube(), {1.0})[0], closed), 0.0, 1e-3);
}

/// 9: hyperplane inequalities with c_3; the ball saturates both.
inline void hyperplane_suite(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  std::vector<std::pair<std::string, Body>> bodies{{"ball", LpBall::make(3, 2.0)}, {"cube", samples::cube()}};
  for (int t = 0; t < 10; ++t) bodies.emplace_back("zonotope " + std::to_string(t), samples::zonotope(3 + t, rng));
  for (const auto& [name, b] : bodies) {
    const auto rep = run_hyperplane_inequalities(b, opt);
    for (const auto& c : rep.checks) r.checks.push_back({name + ": " + c.name, c.lhs, c.rhs, c.tolerance, c.pass});
    if (rep.checks.size() != 2) r.check(name + ": lower inequality not evaluated", 1.0, 0.0, 0.0);
    if (name == "ball") {
      double v = 0.0, mx = 0.0, mn = 0.0;
      for (const auto& [k, x] : rep.quantities) {
        if (k == "volume_two_thirds") v = x;
        if (k == "max_P") mx = x;
        if (k == "min_P") mn = x;
      }
      r.check("ball: |(4pi/3)^{2/3} - c_3 max P|", std::abs(v - c_n(3) * mx), 0.0, 1e-6);
      r.check("ball: |(4pi/3)^{2/3} - c_3 min P|", std::abs(v - c_n(3) * mn), 0.0, 1e-6);
    }
  }
}

/// 10: isotropic position.
inline void isotropic_suite(ExperimentReport& r, std::mt19937_64& rng, const HarnessOptions& opt) {
  const auto cube = isotropize(samples::cube());
  r.check("cube: covariance residual", cube.certificate.covariance_residual, 0.0, 1e-9);
  r.check("cube: |L - sqrt(1/12)|", std::abs(cube.certificate.isotropic_constant - std::sqrt(1.0 / 12.0)), 0.0, 1e-12);
  const auto boxr = isotropize(samples::box(1, 2, 5));
  Matrix s = Matrix::Zero(3, 3);
  s.diagonal() << 1, 2, 5;
  const Matrix m = boxr.certificate.transform * s;
  const Matrix gram = m.transpose() * m;
  r.check("box 1x2x5: covariance residual", boxr.certificate.covariance_residual, 0.0, 1e-3);
  r.check("box 1x2x5: T diag(1,2,5) conformal", (gram - gram(0, 0) * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() / gram(0, 0),
          0.0, 1e-9);
  const double lb = ball_isotropic_constant(3);
  double margin = HUGE_VAL, sampled = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto z = samples::zonotope(4 + t, rng);
    const double l = isotropic_constant(z);
    // sampled second moments give an independent estimate of L
    const auto mc = covariance_monte_carlo(z, 100000, opt.seed + static_cast<std::uint64_t>(t));
    const double l_mc = std::sqrt(std::cbrt(mc.matrix.determinant()) / std::pow(volume(z), 5.0 / 3.0));
    r.quantity("zonotope_" + std::to_string(t) + "_L", l);
    r.quantity("zonotope_" + std::to_string(t) + "_L_sampled", l_mc);
    sampled = std::max(sampled, relative(l_mc, l));
    margin = std::min(margin, l - lb);
  }
  r.check("L_ball - min L over 10 zonotopes", -margin, 0.0, 0.0);
  r.check("max relative |sampled L - L|", sampled, 0.0, 0.02);
  // fixed seed, identical reports
  const auto a = run_hyperplane_inequalities(samples::cube(), opt).to_json().dump();
  const auto b = run_hyperplane_inequalities(samples::cube(), opt).to_json().dump();
  const auto m1 = covariance_monte_carlo(samples::cube(), 20000, opt.seed);
  const auto m2 = covariance_monte_carlo(samples::cube(), 20000, opt.seed);
  r.check("reports differ under a fixed seed", (a == b && m1.matrix == m2.matrix) ? 0.0 : 1.0, 0.0, 0.0);
}

struct Criterion {
  int index;
  const char* title;
  double budget;
  void (*run)(ExperimentReport&, std::mt19937_64&, const HarnessOptions&);
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "projection evaluators agree", 30, &evaluators},
      {2, "Fourier identities at L = 24", 60, &fourier_suite},
      {3, "curvature transform identity", 120, &curvature_identity_suite},
      {4, "zonoid classification", 120, &classification},
      {5, "integral lower bound and c_n", 60, &integral_bound},
      {6, "Minkowski solver round trip", 300, &minkowski_round_trip},
      {7, "stability counterexample", 600, &stability_counterexample},
      {8, "derivative step", 60, &derivative_step},
      {9, "hyperplane inequalities with c_3", 60, &hyperplane_suite},
      {10, "isotropic suite", 300, &isotropic_suite},
  };
  return all;
}

}  // namespace acceptance

/// Runs the selected criteria (all when `which` is empty). Errors become failed reports.
inline std::vector<CriterionResult> run_acceptance(const HarnessOptions& opt, const std::vector<int>& which = {},
                                                   const std::function<void(const CriterionResult&)>& on_done = {}) {
  std::vector<CriterionResult> out;
  for (const auto& c : acceptance::criteria()) {
    if (!which.empty() && std::find(which.begin(), which.end(), c.index) == which.end()) continue;
    CriterionResult res;
    res.index = c.index;
    res.title = c.title;
    res.budget = c.budget;
    res.report.experiment = "acceptance";
    res.report.id = "criterion_" + std::to_string(c.index);
    res.report.seed = opt.seed;
    res.report.body("title", c.title);
    auto rng = acceptance::stream(opt.seed, c.index);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(res.report, rng, opt);
      res.report.conclude();
    } catch (const std::exception& e) {
      res.report.outcome = Outcome::fail;
      res.report.note = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_done) on_done(res);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace projkit
