#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "projkit/bodies.hpp"
#include "projkit/error.hpp"
#include "projkit/isotropic.hpp"
#include "projkit/minkowski.hpp"
#include "projkit/projections.hpp"
#include "projkit/report.hpp"
#include "projkit/sphere/extremum.hpp"
#include "projkit/sphere/fourier.hpp"
#include "projkit/zonoid.hpp"

namespace projkit {

/// Tolerances of the experiments; every field can be overridden by name from a JSON map.
struct Tolerances {
  double parseval = 1e-6;          // relative gap of the Parseval pairing
  double chain = 1e-9;             // relative, constant-free inequalities of a proof chain
  double ordering = 1e-8;          // pointwise orderings of projection functions
  double truncation_slack = 0.05;  // relative slack on explicit-constant conclusions
  double derivative = 1e-3;        // relative, central-difference slope
  double hyperplane = 1e-9;        // relative, inequalities with the constant c_n
  double isotropy = 1e-3;          // covariance residual accepted as isotropic up to dilation
  double zonoid = 1e-6;            // positivity margin of the zonoid classifier
  double kkt = 1e-8;               // KKT residual of the Minkowski solver

  std::vector<std::pair<std::string, double*>> fields() {
    return {{"parseval", &parseval}, {"chain", &chain}, {"ordering", &ordering}, {"truncation_slack", &truncation_slack},
            {"derivative", &derivative}, {"hyperplane", &hyperplane}, {"isotropy", &isotropy},
            {"zonoid", &zonoid}, {"kkt", &kkt}};
  }

  /// Unknown names or non-numeric values are rejected.
  void override_from(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::parse, "tolerance file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      bool found = false;
      for (auto& [name, slot] : fields())
        if (name == key) {
          if (!value.is_number() || !(value.get<double>() >= 0.0))
            throw Error(Errc::parse, "tolerance '" + key + "' must be a non-negative number");
          *slot = value.get<double>();
          found = true;
        }
      if (!found) throw Error(Errc::parse, "unknown tolerance '" + key + "'");
    }
  }

  void record(ExperimentReport& r) const {
    auto copy = *this;
    for (const auto& [name, slot] : copy.fields()) r.tolerance(name, *slot);
  }
};

struct HarnessOptions {
  std::size_t grid = 2000;
  int degree = kDefaultDegree;
  std::uint64_t seed = 0;
  int refine_starts = 3;
  Tolerances tol{};
  CounterexampleOptions counterexample{};
};

inline ZonoidOptions zonoid_options(const HarnessOptions& opt) {
  ZonoidOptions z;
  z.grid = opt.grid;
  z.tol = opt.tol.zonoid;
  return z;
}

inline CounterexampleOptions counterexample_options(const HarnessOptions& opt) {
  auto co = opt.counterexample;
  co.zonoid = zonoid_options(opt);
  co.solver.tolerance = opt.tol.kkt;
  return co;
}

// ---------------------------------------------------------------------------------------------
// Shared measurements

/// P_K as a function on S^2; smooth bodies use their precomputed Cauchy expansion.
inline std::function<double(const Eigen::Vector3d&)> projection_evaluator(const Body& body) {
  if (const auto* s = std::get_if<SmoothBody>(&body)) {
    auto e = std::make_shared<HarmonicExpansion>(projection_expansion(s->curvature()));
    return [e](const Eigen::Vector3d& x) { return evaluate(*e, x); };
  }
  return [body](const Eigen::Vector3d& x) { return projection_function(body, Direction::from(Vector(x))); };
}

inline SphereExtremum sphere_extremum(const std::function<double(const Eigen::Vector3d&)>& fn, bool maximize,
                                      const HarnessOptions& opt, std::vector<Eigen::Vector3d> extra = {}) {
  ExtremumOptions e;
  e.grid = opt.grid;
  e.starts = opt.refine_starts;
  e.extra = std::move(extra);
  return extremize_on_sphere(fn, maximize, e);
}

/// Relative distance of the covariance from a multiple of the identity.
inline double isotropy_residual(const Body& body) {
  const auto c = covariance(body).matrix;
  const double d = c.trace() / c.rows();
  return (c - d * Matrix::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff() / d;
}

/// L_K of the volume-one dilate of a body that is isotropic up to dilation.
inline double dilation_isotropic_constant(const Body& body) {
  const auto c = covariance(body).matrix;
  const int n = static_cast<int>(c.rows());
  return std::sqrt(c.trace() / n / std::pow(volume(body), (n + 2.0) / n));
}

/// Smooth surrogate of a polytopal body in isotropic position: smoothing does not commute with
/// linear maps, so T is updated by the isotropizing map of smooth(T P) until the residual of the
/// smooth image is below tol. The smoothing of T P keeps zonotopes zonoids.
inline SmoothBody smooth_isotropic(const Body& body, int L, double tol = 1e-6, int max_rounds = 20) {
  const int n = dimension(body);
  Matrix t = Matrix::Identity(n, n);
  for (int round = 0; round < max_rounds; ++round) {
    SmoothBody s = smooth(linear_image(body, t), L);
    const auto iso = isotropize(Body(s));
    if (isotropy_residual(s) <= tol) return s;
    t = iso.certificate.transform * t;
  }
  throw Error(Errc::non_convergence, "smoothed image did not reach isotropic position");
}

struct ProjectionBodyCertificate {
  bool certified = false;
  std::string how;
};

/// Zonotopes and Euclidean balls are projection bodies by construction; other bodies are
/// classified through their smoothing at degree L.
inline ProjectionBodyCertificate certify_projection_body(const Body& body, const HarnessOptions& opt) {
  if (std::holds_alternative<Zonotope>(body)) return {true, "zonotope"};
  if (const auto* b = std::get_if<LpBall>(&body); b && b->is_euclidean()) return {true, "euclidean ball"};
  const auto z = zonoid_options(opt);
  const auto* s = std::get_if<SmoothBody>(&body);
  const auto c = is_projection_body(s ? *s : smooth(body, opt.degree), z);
  return {c.verdict == ZonoidVerdict::certified_yes, std::string("classifier: ") + to_string(c.verdict)};
}

inline double log_squared(double x) { return std::log(x) * std::log(x); }

namespace detail {

inline const SmoothBody& require_smooth(const Body& body, const char* role) {
  const auto* s = std::get_if<SmoothBody>(&body);
  if (!s) throw Error(Errc::precondition, std::string(role) + " must be a smooth body");
  return *s;
}

/// Rule exact for products of the support transform of d and the curvature transform of k.
inline const SphericalQuadrature& pairing_rule(const SmoothBody& d, const SmoothBody& k) {
  return cached_quadrature(3, d.degree() + k.curvature().density.max_degree + 2);
}

inline std::vector<Eigen::Vector3d> rule_nodes(const SphericalQuadrature& q) {
  std::vector<Eigen::Vector3d> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = q.node3(i);
  return out;
}

/// Constant-free links of the first stability argument for (K, D, eps), appended to r.
/// Returns true when all links hold.
inline bool stability_chain(ExperimentReport& r, const SmoothBody& k, const SmoothBody& d, double eps,
                            const HarnessOptions& opt) {
  using std::numbers::pi;
  const double tp3 = std::pow(2.0 * pi, 3);
  const auto& q = pairing_rule(d, k);
  const auto td = support_transform(d);
  const auto tk = curvature_transform(k);
  const auto tdd = curvature_transform(d);
  double pair_dk = 0.0, pair_dd = 0.0, int_td = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto x = q.node3(i);
    const double a = evaluate(td, x);
    pair_dk += q.weights[i] * a * evaluate(tk, x);
    pair_dd += q.weights[i] * a * evaluate(tdd, x);
    int_td += q.weights[i] * a;
  }
  // sphere-side integrals from orthonormal coefficients
  auto inner = [](const HarmonicExpansion& a, const HarmonicExpansion& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(a.coeffs.size(), b.coeffs.size()); ++i) s += a.coeffs[i] * b.coeffs[i];
    return s;
  };
  const double hd_fk = inner(d.support_expansion(), k.curvature().density);
  const double hd_fd = inner(d.support_expansion(), d.curvature().density);
  const double vk = k.volume(), vd = d.volume();
  r.quantity("pairing_transform_D_K", pair_dk);
  r.quantity("pairing_transform_D_D", pair_dd);
  r.quantity("integral_support_transform_D", int_td);
  r.quantity("mixed_volume_K_D", hd_fk / 3.0);

  const double tol = opt.tol.chain;
  bool ok = true;
  // Parseval: transforms paired on the sphere equal (2 pi)^3 times the direct pairing
  ok &= r.check("parseval |pair(K,D) - (2pi)^3 int h_D f_K|", std::abs(pair_dk - tp3 * hd_fk), 0.0,
                opt.tol.parseval * std::abs(tp3 * hd_fk));
  ok &= r.check("parseval |pair(D,D) - (2pi)^3 int h_D f_D|", std::abs(pair_dd - tp3 * hd_fd), 0.0,
                opt.tol.parseval * std::abs(tp3 * hd_fd));
  // integration of the Fourier-side ordering against the non-positive transform of h_D
  ok &= r.check("pair(D,K) + pi eps int (h_D r)^ <= pair(D,D)", pair_dk + pi * eps * int_td, pair_dd,
                tol * std::abs(pair_dd));
  // first Minkowski inequality V_1(K, D) >= |K|^{2/3} |D|^{1/3}
  ok &= r.check("|K|^{2/3} |D|^{1/3} <= V_1(K,D)", std::cbrt(vk * vk * vd), hd_fk / 3.0, tol * hd_fk / 3.0);
  // conclusion of the chain before the unspecified constant enters
  const double bound = std::cbrt(vd * vd) - pi * eps * int_td / (3.0 * tp3 * std::cbrt(vd));
  r.quantity("chain_bound_K_two_thirds", bound);
  ok &= r.check("|K|^{2/3} <= |D|^{2/3} - pi eps int (h_D r)^ / (3 (2pi)^3 |D|^{1/3})", std::cbrt(vk * vk), bound,
                tol * bound);
  return ok;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Experiments

/// Stability in the affirmative direction: D a projection body, isotropic up to dilation, and
/// P_K <= P_D + eps. A negative or absent eps means "the smallest admissible eps".
inline ExperimentReport run_stability(const Body& kb, const Body& db, std::optional<double> eps, const HarnessOptions& opt) {
  ExperimentReport r;
  r.experiment = "stability";
  r.id = "stability_affirmative";
  r.seed = opt.seed;
  r.body("K", describe(kb));
  r.body("D", describe(db));
  opt.tol.record(r);
  const auto& k = detail::require_smooth(kb, "K");
  const auto& d = detail::require_smooth(db, "D");
  const auto cert = certify_projection_body(d, opt);
  const double iso = isotropy_residual(d);
  r.quantity("isotropy_residual_D", iso);
  if (!cert.certified) {
    r.outcome = Outcome::hypothesis_violated;
    r.note = "D is not a certified projection body (" + cert.how + ")";
    return r;
  }
  if (iso > opt.tol.isotropy) {
    r.outcome = Outcome::hypothesis_violated;
    r.note = "D is not isotropic up to dilation";
    return r;
  }
  const auto pk = projection_evaluator(k), pd = projection_evaluator(d);
  const auto nodes = detail::rule_nodes(detail::pairing_rule(d, k));
  const auto top = sphere_extremum([&](const Eigen::Vector3d& x) { return pk(x) - pd(x); }, true, opt, nodes);
  r.quantity("max_P_K_minus_P_D", top.value);
  double e = std::max(top.value, 0.0);
  if (eps && *eps >= 0.0) {
    r.quantity("eps_given", *eps);
    if (top.value > *eps + opt.tol.ordering) {
      r.outcome = Outcome::hypothesis_violated;
      r.note = "P_K <= P_D + eps fails on the sphere";
      return r;
    }
    e = *eps;
  }
  r.quantity("eps", e);
  const double vk = k.volume(), vd = d.volume(), ld = dilation_isotropic_constant(d);
  r.quantity("volume_K", vk);
  r.quantity("volume_D", vd);
  r.quantity("isotropic_constant_D", ld);
  detail::stability_chain(r, k, d, e, opt);
  const double gap = std::cbrt(vk * vk) - std::cbrt(vd * vd);
  r.quantity("volume_gap", gap);
  if (e > 0.0) {
    r.constant("C_hat", gap / (e * log_squared(4.0) * ld));
  } else {
    // P_K <= P_D everywhere: the affirmative answer |K| <= |D|
    r.check("|K| <= |D|", vk, vd, opt.tol.chain * vd);
  }
  r.conclude();
  return r;
}

/// Volume difference for a projection body D: eps = max(P_K - P_D) must be positive.
inline ExperimentReport run_volume_difference(const Body& kb, const Body& db, const HarnessOptions& opt) {
  ExperimentReport r;
  r.experiment = "volume_difference";
  r.id = "volume_difference";
  r.seed = opt.seed;
  r.body("K", describe(kb));
  r.body("D", describe(db));
  opt.tol.record(r);
  const auto& k = detail::require_smooth(kb, "K");
  const auto& d = detail::require_smooth(db, "D");
  const auto cert = certify_projection_body(d, opt);
  const double iso = isotropy_residual(d);
  r.quantity("isotropy_residual_D", iso);
  if (!cert.certified || iso > opt.tol.isotropy) {
    r.outcome = Outcome::hypothesis_violated;
    r.note = !cert.certified ? "D is not a certified projection body (" + cert.how + ")" : "D is not isotropic up to dilation";
    return r;
  }
  const auto pk = projection_evaluator(k), pd = projection_evaluator(d);
  const auto nodes = detail::rule_nodes(detail::pairing_rule(d, k));
  const auto top = sphere_extremum([&](const Eigen::Vector3d& x) { return pk(x) - pd(x); }, true, opt, nodes);
  const double eps = top.value;
  const double vk = k.volume(), vd = d.volume();
  const double gap = std::cbrt(vk * vk) - std::cbrt(vd * vd);
  r.quantity("eps", eps);
  r.quantity("volume_K", vk);
  r.quantity("volume_D", vd);
  r.quantity("volume_gap", gap);
  if (!(eps > 0.0)) {
    r.outcome = Outcome::not_applicable;
    r.note = "P_K <= P_D everywhere";
    return r;
  }
  detail::stability_chain(r, k, d, eps, opt);
  if (gap <= 0.0) {
    r.outcome = Outcome::vacuous;
    r.note = "|K| <= |D|: the right-hand side is not positive";
    return r;
  }
  r.constant("c_hat", eps * log_squared(3.0) / gap);
  r.conclude();
  return r;
}

/// Parallel-body volume |D + t B| for small |t|, negative t included.
inline double parallel_volume(const Body& body, double t) {
  if (const auto* s = std::get_if<SmoothBody>(&body))
    return SmoothBody::from_expansion(s->support_expansion() + HarmonicExpansion::constant(s->degree(), t)).volume();
  return steiner_coefficients(body).at(t);
}

/// Surface area against shadow perimeters, with the derivative step checked by central differences.
inline ExperimentReport run_surface_area(const Body& db, const HarnessOptions& opt) {
  ExperimentReport r;
  r.experiment = "surface_area";
  r.id = "surface_hyperplane";
  r.seed = opt.seed;
  r.body("D", describe(db));
  opt.tol.record(r);
  const auto cert = certify_projection_body(db, opt);
  const double iso = isotropy_residual(db);
  r.quantity("isotropy_residual_D", iso);
  if (!cert.certified || iso > opt.tol.isotropy) {
    r.outcome = Outcome::hypothesis_violated;
    r.note = !cert.certified ? "D is not a certified projection body (" + cert.how + ")" : "D is not isotropic up to dilation";
    return r;
  }
  const double s = surface_area(db), v = volume(db);
  auto perim = [&](const Eigen::Vector3d& x) { return shadow_perimeter(db, Direction::from(Vector(x))); };
  const auto hi = sphere_extremum(perim, true, opt), lo = sphere_extremum(perim, false, opt);
  r.quantity("surface_area", s);
  r.quantity("volume", v);
  r.quantity("max_shadow_perimeter", hi.value);
  r.quantity("min_shadow_perimeter", lo.value);
  // derivative of |D + t B|^{2/3} at t = 0
  const double h = 1e-4 * std::cbrt(v);
  const double slope = (std::cbrt(std::pow(parallel_volume(db, h), 2)) - std::cbrt(std::pow(parallel_volume(db, -h), 2))) / (2.0 * h);
  const double exact = 2.0 / 3.0 * s / std::cbrt(v);
  r.quantity("central_difference_slope", slope);
  r.quantity("derivative_closed_form", exact);
  r.check("|slope - (2/3)|D|^{-1/3} S(D)|", std::abs(slope - exact), 0.0, opt.tol.derivative * exact);
  r.constant("C_hat_max", s / (hi.value * std::cbrt(v)));
  r.constant("c_hat_min", s / (lo.value * std::cbrt(v)));
  r.conclude();
  return r;
}

/// Both counterexample constructions for a non-projection body K.
inline ExperimentReport run_counterexamples(const Body& kb, const HarnessOptions& opt) {
  using std::numbers::pi;
  ExperimentReport r;
  r.experiment = "counterexamples";
  r.id = "stability_and_separation";
  r.seed = opt.seed;
  r.body("K", describe(kb));
  opt.tol.record(r);
  const auto* kp = std::get_if<SmoothBody>(&kb);
  const SmoothBody k = kp ? *kp : smooth(kb, opt.degree);
  auto co = counterexample_options(opt);
  const auto cls = is_projection_body(k, co.zonoid);
  r.quantity("zonoid_excursion", cls.excursion);
  if (cls.verdict != ZonoidVerdict::certified_no) {
    r.outcome = Outcome::not_applicable;
    r.note = std::string("K is not certified as a non-projection body: ") + to_string(cls.verdict);
    return r;
  }
  const double c3 = c_n(3), slack = 1.0 - opt.tol.truncation_slack;
  const double vk = k.volume();
  r.quantity("volume_K", vk);
  r.quantity("c_3", c3);
  r.quantity("witness_radius", cls.witness->radius);
  const auto pk = projection_evaluator(k);
  for (auto mode : {CounterexampleMode::stability, CounterexampleMode::separation}) {
    const std::string tag = to_string(mode);
    co.mode = mode;
    std::optional<CounterexampleResult> ce;
    try {
      ce = construct_shephard_counterexample(k, co);
    } catch (const Error& e) {
      r.check(tag + ": construction succeeded", 1.0, 0.0, 0.0);
      r.note += tag + ": " + e.what() + "; ";
      continue;
    }
    const auto& t = ce->trace;
    const auto pd_exp = projection_expansion(DensityMeasure{ce->density, t.min_curvature_d});
    auto diff = [&](const Eigen::Vector3d& x) { return pk(x) - evaluate(pd_exp, x); };
    const auto hi = sphere_extremum(diff, true, opt), lo = sphere_extremum(diff, false, opt);
    const double eps = ce->epsilon, vd = t.volume_d_bound;
    const double gap = std::cbrt(vk * vk) - std::cbrt(vd * vd);
    r.quantity(tag + "_eps", eps);
    r.quantity(tag + "_delta", ce->delta);
    r.quantity(tag + "_halvings", t.halvings);
    r.quantity(tag + "_volume_D_bound", vd);
    r.quantity(tag + "_volume_D_smooth", t.volume_d_smooth);
    r.quantity(tag + "_density_l2_error", t.density_l2_error);
    r.quantity(tag + "_identity_residual", t.identity_residual);
    r.quantity(tag + "_bump_min", t.bump_min);
    r.quantity(tag + "_bump_leak", t.bump_leak);
    r.quantity(tag + "_max_P_K_minus_P_D", hi.value);
    r.quantity(tag + "_min_P_K_minus_P_D", lo.value);
    r.check(tag + ": min f_D > 0", -t.min_curvature_d, 0.0, 0.0);
    r.check(tag + ": bump v >= 0", -t.bump_min, 0.0, 0.0);
    if (mode == CounterexampleMode::stability) {
      r.check("stability: P_D <= P_K", -lo.value, 0.0, opt.tol.ordering);
      r.check("stability: P_K <= P_D + eps", hi.value, eps, opt.tol.ordering);
      r.check("stability: |D|^{2/3} + (1 - slack) c_3 eps <= |K|^{2/3}", std::cbrt(vd * vd) + slack * c3 * eps,
              std::cbrt(vk * vk), 0.0);
      // explicit-constant volume difference with the measured maximum
      r.check("stability: max(P_K - P_D) <= (|K|^{2/3} - |D|^{2/3}) / ((1 - slack) c_3)", hi.value,
              gap / (slack * c3), 0.0);
    } else {
      r.check("separation: P_K <= P_D - eps", hi.value + eps, 0.0, opt.tol.ordering);
      const double sep_gap = -gap;  // |D|^{2/3} - |K|^{2/3}
      r.quantity("separation_volume_gap", sep_gap);
      const double iso = isotropy_residual(k);
      r.quantity("isotropy_residual_K", iso);
      if (iso <= opt.tol.isotropy) {
        const double lk = dilation_isotropic_constant(k);
        r.quantity("isotropic_constant_K", lk);
        r.constant("C_tilde", sep_gap / (eps * log_squared(4.0) * lk));
        if (sep_gap > 0.0) r.constant("c_hat_min", -hi.value * lk * log_squared(3.0) / sep_gap);
      } else {
        r.note += "separation: K is not isotropic up to dilation, empirical constants not recorded; ";
      }
    }
  }
  r.conclude();
  return r;
}

/// Hyperplane inequalities with the explicit constant c_3.
inline ExperimentReport run_hyperplane_inequalities(const Body& lb, const HarnessOptions& opt) {
  ExperimentReport r;
  r.experiment = "hyperplane";
  r.id = "hyperplane_volume";
  r.seed = opt.seed;
  r.body("L", describe(lb));
  opt.tol.record(r);
  if (dimension(lb) != 3) throw Error(Errc::unsupported, "the hyperplane inequalities are evaluated for n = 3");
  const auto p = projection_evaluator(lb);
  const auto hi = sphere_extremum(p, true, opt), lo = sphere_extremum(p, false, opt);
  const double v23 = std::cbrt(std::pow(volume(lb), 2)), c3 = c_n(3);
  r.quantity("volume_two_thirds", v23);
  r.quantity("max_P", hi.value);
  r.quantity("min_P", lo.value);
  r.check("|L|^{2/3} <= c_3 max P", v23, c3 * hi.value, opt.tol.hyperplane * v23);
  const auto cert = certify_projection_body(lb, opt);
  r.quantity("projection_body_certified", cert.certified ? 1.0 : 0.0);
  if (cert.certified)
    r.check("c_3 min P <= |L|^{2/3}", c3 * lo.value, v23, opt.tol.hyperplane * v23);
  else
    r.note = "lower inequality not applicable: " + cert.how;
  r.constant("c_hat_log", hi.value * log_squared(3.0) / v23);
  r.conclude();
  return r;
}

}  // namespace projkit
