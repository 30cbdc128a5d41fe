#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "projkit/bodies.hpp"
#include "projkit/error.hpp"
#include "projkit/geometry/hull.hpp"
#include "projkit/projections.hpp"
#include "projkit/sphere/fourier.hpp"
#include "projkit/sphere/harmonics.hpp"
#include "projkit/sphere/quadrature.hpp"
#include "projkit/zonoid.hpp"

namespace projkit {

// ---------------------------------------------------------------------------------------------
// Polytope with prescribed normals: P(h) = {x : <u_i, x> <= h_i}

/// Facet areas of P(h) and their derivatives, from the hull of the dual points u_i / h_i.
/// A dual hull vertex i is a facet of P; a dual hull facet is a vertex of P; dual edges are edges.
struct FacetGeometry {
  std::vector<double> areas;
  Matrix area_jacobian;  // dA_i / dh_j, symmetric
  std::vector<Eigen::Vector3d> vertices;
  double volume = 0.0;
};

inline FacetGeometry facet_geometry(const std::vector<Eigen::Vector3d>& normals, const Vector& h) {
  const int n = static_cast<int>(normals.size());
  std::vector<Eigen::Vector3d> dual(n);
  for (int i = 0; i < n; ++i) dual[i] = normals[i] / h[i];
  const auto hull = geometry::convex_hull3(dual, 1e-13);
  FacetGeometry g;
  g.areas.assign(n, 0.0);
  g.area_jacobian = Matrix::Zero(n, n);
  for (const auto& f : hull.facets) g.vertices.push_back(f.normal / f.offset);
  for (const auto& e : hull.edges) {
    const double len = (g.vertices[e.facet_left] - g.vertices[e.facet_right]).norm();
    const double c = std::clamp(normals[e.a].dot(normals[e.b]), -1.0, 1.0);
    const double s = std::sqrt(1.0 - c * c);
    // signed distances from the feet h_i u_i to the common edge, within each facet plane
    g.areas[e.a] += 0.5 * len * (h[e.b] - h[e.a] * c) / s;
    g.areas[e.b] += 0.5 * len * (h[e.a] - h[e.b] * c) / s;
    g.area_jacobian(e.a, e.b) += len / s;
    g.area_jacobian(e.b, e.a) += len / s;
    g.area_jacobian(e.a, e.a) -= len * c / s;
    g.area_jacobian(e.b, e.b) -= len * c / s;
  }
  for (int i = 0; i < n; ++i) g.volume += h[i] * g.areas[i] / 3.0;
  return g;
}

struct MinkowskiOptions {
  /// Stop when the relative spread of recovered area / target weight is below this.
  double tolerance = 1e-8;
  int max_iterations = 50;
  /// Defect-correction rounds for density problems (0: plain discretization).
  int corrections = 3;
  /// Exactness degree of the discretization rule for density problems (0: 2L + 14).
  int rule_degree = 0;
};

struct AtomicSolution {
  std::vector<Eigen::Vector3d> normals;
  std::vector<double> support;      // h_i, matched to normals
  std::vector<double> areas;        // recovered facet areas
  double max_area_error = 0.0;      // max_i |A_i - f_i| / f_i
  double kkt_residual = 0.0;        // relative spread of A_i / f_i before rescaling
  int iterations = 0;
  std::vector<Eigen::Vector3d> vertices;  // vertices of P(h)

  Polytope polytope() const {
    std::vector<Vector> v;
    for (const auto& x : vertices) v.push_back(Vector(x));
    return Polytope::from_vertices(v);
  }
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

/// Antipodal partner of every atom; throws unless the measure is even.
inline std::vector<int> antipodal_pairs(const std::vector<Eigen::Vector3d>& u, const std::vector<double>& f) {
  const int n = static_cast<int>(u.size());
  std::vector<int> partner(n, -1);
  for (int i = 0; i < n; ++i) {
    if (partner[i] >= 0) continue;
    for (int j = i + 1; j < n; ++j)
      if (partner[j] < 0 && (u[i] + u[j]).norm() <= 1e-9) {
        if (std::abs(f[i] - f[j]) > 1e-9 * std::max(f[i], f[j]))
          throw Error(Errc::infeasible, "antipodal weights differ");
        partner[i] = j;
        partner[j] = i;
        break;
      }
    if (partner[i] < 0) throw Error(Errc::infeasible, "normal without antipode");
  }
  return partner;
}

}  // namespace detail

/// Even discrete Minkowski problem by damped Newton on
///   Phi(h) = sum f_i h_i - (F / 3) log V(h),  F = sum f_i,
/// over pair-symmetric support numbers. Phi is convex and its minimiser has A_i proportional
/// to f_i; the minimiser is then rescaled so that A_i = f_i. `start` optionally gives initial
/// support numbers (one per atom, pair-symmetric).
inline AtomicSolution solve_minkowski(const AtomicMeasure& target, const MinkowskiOptions& opt = {},
                                      std::span<const double> start = {}) {
  if (target.dimension != 3) throw Error(Errc::unsupported, "the solver works in R^3");
  const int n = static_cast<int>(target.normals.size());
  std::vector<Eigen::Vector3d> u(n);
  for (int i = 0; i < n; ++i) {
    if (!(target.areas[i] > 0.0)) throw Error(Errc::infeasible, "weights must be positive");
    u[i] = target.normals[i].head<3>().normalized();
  }
  const auto& f = target.areas;
  const auto partner = detail::antipodal_pairs(u, f);
  if (target.centroid_residual() > 1e-9) throw Error(Errc::infeasible, "weights are not centred");
  Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) spread += f[i] * u[i] * u[i].transpose();
  if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(spread).eigenvalues().minCoeff() <= 1e-12 * spread.trace())
    throw Error(Errc::infeasible, "normals do not span R^3");

  // pair variables
  std::vector<int> rep, pair_of(n);
  for (int i = 0; i < n; ++i)
    if (partner[i] > i) {
      pair_of[i] = pair_of[partner[i]] = static_cast<int>(rep.size());
      rep.push_back(i);
    }
  const int m = static_cast<int>(rep.size());
  double total = 0.0;
  for (double w : f) total += w;
  Vector fp(m);
  for (int p = 0; p < m; ++p) fp[p] = 2.0 * f[rep[p]];
  auto expand_pairs = [&](const Vector& hp) {
    Vector h(n);
    for (int i = 0; i < n; ++i) h[i] = hp[pair_of[i]];
    return h;
  };
  auto objective = [&](const Vector& hp, const FacetGeometry& g) {
    return fp.dot(hp) - total / 3.0 * std::log(g.volume);
  };
  auto kkt = [&](const FacetGeometry& g) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
    for (int p = 0; p < m; ++p) {
      const double r = g.areas[rep[p]] / f[rep[p]];
      lo = std::min(lo, r), hi = std::max(hi, r), mean += r / m;
    }
    return (hi - lo) / mean;
  };

  // default start: a circumscribed ball scaled to the target area
  Vector hp = Vector::Constant(m, std::sqrt(total / (4.0 * std::numbers::pi)));
  if (!start.empty()) {
    if (static_cast<int>(start.size()) != n) throw Error(Errc::dimension_mismatch, "start size differs from atom count");
    for (int p = 0; p < m; ++p) hp[p] = start[rep[p]];
    if (!(hp.minCoeff() > 0.0)) throw Error(Errc::precondition, "start support numbers must be positive");
  }
  FacetGeometry geo = facet_geometry(u, expand_pairs(hp));
  // an absent facet stays absent while h_i exceeds the support of P(h) at u_i; lowering it to
  // that support leaves P unchanged, decreases Phi, and lets the next step open the facet
  auto clamp_absent = [&]() {
    bool changed = false;
    for (int p = 0; p < m; ++p) {
      if (geo.areas[rep[p]] > 0.0) continue;
      double hs = 0.0;
      for (const auto& x : geo.vertices) hs = std::max(hs, u[rep[p]].dot(x));
      if (hs < hp[p]) hp[p] = hs, changed = true;
    }
    if (changed) geo = facet_geometry(u, expand_pairs(hp));
  };
  AtomicSolution sol;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    clamp_absent();
    Vector ap(m);
    for (int p = 0; p < m; ++p) ap[p] = 2.0 * geo.areas[rep[p]];
    sol.kkt_residual = kkt(geo);
    sol.iterations = it;
    if (sol.kkt_residual <= opt.tolerance) break;
    // a plateau near the optimum is rounding-limited, handled like a stalled line search
    if (sol.kkt_residual < 0.5 * best) best = sol.kkt_residual, since_best = 0;
    else if (++since_best >= 8 && sol.kkt_residual <= 1e3 * opt.tolerance) break;
    if (it == opt.max_iterations)
      throw Error(Errc::non_convergence, "Minkowski solver stopped with KKT residual " + detail::sci(sol.kkt_residual));
    // gradient and Hessian in pair variables
    const double c = total / 3.0;
    const Vector grad = fp - c / geo.volume * ap;
    Matrix jac(m, m);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        const int i = rep[p], j = rep[q];
        jac(p, q) = 2.0 * (geo.area_jacobian(i, j) + geo.area_jacobian(i, partner[j]));
      }
    Matrix hess = c * (ap * ap.transpose() / (geo.volume * geo.volume) - jac / geo.volume);
    const double scale = hess.diagonal().cwiseAbs().maxCoeff();
    // atoms whose facet is absent have no curvature in h; give them the mean diagonal so the
    // step moves them like a scaled gradient step
    double mean_diag = 0.0;
    for (int p = 0; p < m; ++p) mean_diag += std::abs(hess(p, p)) / m;
    for (int p = 0; p < m; ++p)
      if (std::abs(hess(p, p)) < 1e-6 * mean_diag) hess(p, p) += mean_diag;
    Vector step;
    for (double reg = 1e-12; ; reg *= 100.0) {
      Matrix reg_hess = hess;
      reg_hess.diagonal().array() += reg * scale;
      Eigen::LDLT<Matrix> ldlt(reg_hess);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = -ldlt.solve(grad);
        if (step.allFinite() && step.dot(grad) < 0.0) break;
      }
      if (reg > 1e6) {
        step = -grad / scale;
        break;
      }
    }
    // backtracking keeps h positive and decreases Phi; near the optimum the decrease of Phi is
    // below rounding, so a halving of the KKT residual is accepted as well
    const double phi0 = objective(hp, geo);
    double t = 1.0;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Vector trial = hp + t * step;
      if (trial.minCoeff() <= 0.0) continue;
      FacetGeometry g = facet_geometry(u, expand_pairs(trial));
      if (g.volume > 0.0 &&
          (objective(trial, g) <= phi0 + 1e-4 * t * grad.dot(step) ||
           (sol.kkt_residual < 1e-4 && kkt(g) <= 0.5 * sol.kkt_residual))) {
        hp = trial;
        geo = std::move(g);
        break;
      }
    }
    if (t < 1e-17) {
      // no further descent in double precision
      if (sol.kkt_residual > 1e3 * opt.tolerance)
        throw Error(Errc::non_convergence, "Minkowski solver stalled with KKT residual " + detail::sci(sol.kkt_residual));
      break;
    }
  }
  // rescale so that areas equal the weights: A scales with the square of h
  const double lambda = std::sqrt(total / std::accumulate(geo.areas.begin(), geo.areas.end(), 0.0));
  hp *= lambda;
  const Vector h = expand_pairs(hp);
  geo = facet_geometry(u, h);
  sol.normals = u;
  sol.support.assign(h.data(), h.data() + n);
  sol.areas = geo.areas;
  for (int i = 0; i < n; ++i) sol.max_area_error = std::max(sol.max_area_error, std::abs(geo.areas[i] - f[i]) / f[i]);
  sol.vertices = geo.vertices;
  return sol;
}

// ---------------------------------------------------------------------------------------------
// Density problems

struct DensitySolution {
  SmoothBody body;            // support numbers re-expanded at degree L
  AtomicSolution discrete;    // atoms f(theta_i) w_i on the solver rule
  double density_l2_error = 0.0;  // ||f_body - f|| / ||f|| on the rule
};

/// Rule used to discretize densities for a degree-L reconstruction.
inline const SphericalQuadrature& minkowski_quadrature(int L, const MinkowskiOptions& opt = {}) {
  return cached_quadrature(3, opt.rule_degree > 0 ? opt.rule_degree : 2 * L + 14);
}

/// Even positive density on S^2 -> body with that curvature function. The density is turned into
/// atoms f(theta_i) w_i on a symmetric rule and solved exactly; the support numbers are expanded at
/// degree L on the same rule. The O(spacing^2) gap between a smooth body's curvature and the facet
/// areas of its circumscribed polytope is then removed by defect correction: each round re-targets
/// the atoms with A_i(h_hat) - f_hat(theta_i) w_i measured on the current smooth candidate.
inline DensitySolution solve_minkowski(const HarmonicExpansion& density, int L, const MinkowskiOptions& opt = {}) {
  const auto& q = minkowski_quadrature(L, opt);
  const auto& basis = harmonics(density.max_degree);
  std::vector<Eigen::Vector3d> u(q.size());
  std::vector<double> base(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    u[i] = q.node3(i);
    const double v = basis.evaluate(u[i], density.coeffs);
    if (!(v > 0.0)) throw Error(Errc::infeasible, "density must be positive at every node");
    base[i] = v * q.weights[i];
  }
  auto solve_atoms = [&](std::vector<double> areas, std::span<const double> from) {
    // symmetrize exactly so antipodal atoms carry identical weights
    for (std::size_t i = 0; i < q.size(); ++i) {
      const std::size_t j = q.antipode[i];
      if (j > i) areas[i] = areas[j] = 0.5 * (areas[i] + areas[j]);
      if (!(areas[i] > 0.0)) throw Error(Errc::infeasible, "corrected atom is not positive");
    }
    AtomicMeasure atoms;
    atoms.dimension = 3;
    atoms.normals = q.nodes;
    atoms.areas = std::move(areas);
    return solve_minkowski(atoms, opt, from);
  };
  // continuation from the ball with the same total area: f_t = (1 - t) mean + t f
  double total = 0.0;
  for (double a : base) total += a;
  const double mean = total / (4.0 * std::numbers::pi);
  auto blend = [&](double t) {
    std::vector<double> a(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) a[i] = (1.0 - t) * mean * q.weights[i] + t * base[i];
    return a;
  };
  std::vector<double> h(q.size(), std::sqrt(mean));
  double t = 0.0, dt = 1.0;
  std::optional<AtomicSolution> discrete;
  while (t < 1.0) {
    const double next = std::min(1.0, t + dt);
    try {
      discrete = solve_atoms(blend(next), h);
      h = discrete->support;
      t = next;
      dt *= 2.0;
    } catch (const Error& e) {
      if (e.code() != Errc::non_convergence || dt < 1.0 / 256.0) throw;
      dt *= 0.25;
    }
  }
  // smooth candidate and its relative L2 density error; empty when the expansion is not convex
  auto assess = [&](const AtomicSolution& d) -> std::optional<DensitySolution> {
    std::optional<SmoothBody> body;
    try {
      body = SmoothBody::from_expansion(expand(q, d.support, L));
    } catch (const Error& e) {
      if (e.code() != Errc::not_convex) throw;
      return std::nullopt;
    }
    const auto& fb = body->curvature().density;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double want = basis.evaluate(u[i], density.coeffs);
      const double got = evaluate(fb, u[i]);
      num += q.weights[i] * (got - want) * (got - want);
      den += q.weights[i] * want * want;
    }
    return DensitySolution{std::move(*body), d, std::sqrt(num / den)};
  };
  auto best = assess(*discrete);
  if (!best) throw Error(Errc::not_convex, "degree-L expansion of the solution is not convex");
  // a round is kept only while it lowers the density error
  for (int round = 0; round < opt.corrections; ++round) {
    const auto& hh = best->body.support_expansion();
    Vector hn(q.size());
    std::vector<double> target(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) hn[i] = evaluate(hh, u[i]);
    const auto geo = facet_geometry(u, hn);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto jet = support_jet(hh, u[i]);
      const auto [lo, hi] = principal_radii(jet.hessian);
      target[i] = base[i] + geo.areas[i] - lo * hi * q.weights[i];
    }
    std::optional<DensitySolution> next;
    try {
      next = assess(solve_atoms(std::move(target), best->discrete.support));
    } catch (const Error& e) {
      if (e.code() != Errc::non_convergence && e.code() != Errc::infeasible) throw;
    }
    if (!next || next->density_l2_error >= best->density_l2_error) break;
    best = std::move(next);
  }
  return std::move(*best);
}

inline DensitySolution body_from_curvature(const HarmonicExpansion& density, int L = kDefaultDegree,
                                           const MinkowskiOptions& opt = {}) {
  return solve_minkowski(density, L, opt);
}

// ---------------------------------------------------------------------------------------------
// Counterexample construction

/// Even smooth bump on the cap pair of angular radius rho around +-center, max value 1.
struct BumpFunction {
  Eigen::Vector3d center = Eigen::Vector3d::UnitZ();
  double radius = 0.1;

  double operator()(const Eigen::Vector3d& x) const { return profile(x.dot(center)) + profile(-x.dot(center)); }

  /// Expansion at degree L, damped by the positive kernel so it stays non-negative, then rescaled
  /// to sup 1 on `grid`.
  HarmonicExpansion expansion(int L, const std::vector<Eigen::Vector3d>& grid) const {
    auto e = fejer_damped(expand_function(*this, L, std::max(4 * L, 200)));
    double peak = 0.0;
    for (const auto& x : grid) peak = std::max(peak, evaluate(e, x));
    peak = std::max(peak, evaluate(e, center));
    return (1.0 / peak) * e;
  }

 private:
  double profile(double c) const {
    const double d = std::acos(std::clamp(c, -1.0, 1.0)) / radius;
    return d < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - d * d)) : 0.0;
  }
};

enum class CounterexampleMode { stability, separation };

inline const char* to_string(CounterexampleMode m) { return m == CounterexampleMode::stability ? "stability" : "separation"; }

struct CounterexampleOptions {
  CounterexampleMode mode = CounterexampleMode::stability;
  /// epsilon = eps_scale * min f_K * |B^2|
  double eps_scale = 1e-2;
  /// delta backtracking stops below this multiple of its starting value
  double floor = 1e-6;
  std::size_t check_directions = 10000;
  ZonoidOptions zonoid{};
  MinkowskiOptions solver{};
};

/// Quantities verified along the construction.
struct CounterexampleTrace {
  WitnessCap witness;
  double min_curvature_k = 0.0;
  double min_curvature_d = 0.0;       // min f_D on the check grid and curvature nodes
  double bump_min = 0.0;              // min v (must be >= 0)
  double bump_max_in_omega = 0.0;     // max v on grid points of Omega
  double bump_leak = 0.0;             // max v on grid points outside Omega
  double ordering_violation = 0.0;    // worst violation of the mode's pointwise ordering
  double identity_residual = 0.0;     // max |P_K - P_D - (s eps - 8 pi^2 delta v)|
  double parseval_pairing = 0.0;      // int h_K g = int (h_K r)^ v, >= 0 when v lives in Omega
  int halvings = 0;
  double volume_k = 0.0;
  double volume_d_bound = 0.0;        // upper bound on |D| from the first Minkowski inequality
  double volume_d_smooth = 0.0;       // volume of the smooth reconstruction
  double volume_d_polytope = 0.0;     // volume of the discrete solution
  double mixed_volume = 0.0;          // V_1(D, D_hat) = (1/3) int h_{D_hat} f_D
  double density_l2_error = 0.0;
  double solver_area_error = 0.0;
  std::size_t directions = 0;
};

struct CounterexampleResult {
  CounterexampleMode mode;
  SmoothBody body;             // smooth reconstruction of D
  HarmonicExpansion density;   // f_D
  double epsilon = 0.0;
  double delta = 0.0;
  CounterexampleTrace trace;

  /// |K|^{2/3} - |D|^{2/3}, with |D| replaced by its upper bound.
  double volume_gap() const {
    return std::pow(trace.volume_k, 2.0 / 3.0) - std::pow(trace.volume_d_bound, 2.0 / 3.0);
  }
};

/// Builds D from a non-projection body K: f_D = f_K - delta g -+ eps / |B^2| with g r^-4 = (v r)^.
/// Then P_K - P_D = +-eps - 8 pi^2 delta v, so stability mode gives P_D <= P_K <= P_D + eps and
/// separation mode gives P_K <= P_D - eps.
inline CounterexampleResult construct_shephard_counterexample(const SmoothBody& k, const CounterexampleOptions& opt = {}) {
  using std::numbers::pi;
  const auto cls = is_projection_body(k, opt.zonoid);
  if (cls.verdict != ZonoidVerdict::certified_no || !cls.witness)
    throw Error(Errc::precondition, "no witness Omega: body is not certified as a non-projection body");
  const double min_fk = k.curvature().min_value;
  if (!(min_fk > 0.0)) throw Error(Errc::precondition, "curvature of K must be strictly positive");
  const int L = k.degree();
  const int fl = k.curvature().density.max_degree;
  const auto grid = fibonacci_sphere(opt.check_directions);
  const auto& nodes = curvature_quadrature(L);

  CounterexampleTrace tr;
  tr.witness = *cls.witness;
  tr.min_curvature_k = min_fk;
  tr.directions = grid.size();
  BumpFunction bump{cls.witness->center, std::min(0.5 * cls.witness->inradius, cls.witness->radius)};
  const auto v = bump.expansion(fl, grid);
  const auto g = homogeneous_fourier(v, HomogeneousDegree::support());

  // v on the check grid, split by membership in Omega
  const auto ht = support_transform(k);
  const double level = cls.tol * cls.sup_norm;
  std::vector<double> vg(grid.size());
  tr.bump_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vg[i] = evaluate(v, grid[i]);
    tr.bump_min = std::min(tr.bump_min, vg[i]);
    double& slot = evaluate(ht, grid[i]) > level ? tr.bump_max_in_omega : tr.bump_leak;
    slot = std::max(slot, vg[i]);
  }
  tr.parseval_pairing = 0.0;
  for (std::size_t i = 0; i < k.support_expansion().coeffs.size(); ++i)
    tr.parseval_pairing += k.support_expansion().coeffs[i] * g.coeffs[i];

  const double sign = opt.mode == CounterexampleMode::stability ? 1.0 : -1.0;
  const double eps = opt.eps_scale * min_fk * pi;
  const double delta0 = eps / (8.0 * pi * pi);
  const auto pk = projection_expansion(k.curvature());
  double delta = delta0;
  HarmonicExpansion fd;
  for (;; delta *= 0.5, ++tr.halvings) {
    if (delta < opt.floor * delta0) throw Error(Errc::non_convergence, "delta backtracking reached its floor");
    fd = k.curvature().density - delta * g - HarmonicExpansion::constant(fl, sign * eps / pi);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& x : grid) lo = std::min(lo, evaluate(fd, x));
    for (std::size_t i = 0; i < nodes.size(); ++i) lo = std::min(lo, evaluate(fd, nodes.node3(i)));
    tr.min_curvature_d = lo;
    if (!(lo > 0.0)) continue;
    const auto pd = projection_expansion(DensityMeasure{fd, lo});
    double viol = 0.0, resid = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double a = evaluate(pk, grid[i]), b = evaluate(pd, grid[i]);
      if (opt.mode == CounterexampleMode::stability)
        viol = std::max({viol, b - a, a - b - eps});
      else
        viol = std::max(viol, a - (b - eps));
      resid = std::max(resid, std::abs(a - b - (sign * eps - 8.0 * pi * pi * delta * vg[i])));
    }
    tr.ordering_violation = viol;
    tr.identity_residual = resid;
    if (viol <= 1e-8 * eps) break;
  }

  auto sol = solve_minkowski(fd, L, opt.solver);
  const SmoothBody& dhat = sol.body;
  tr.density_l2_error = sol.density_l2_error;
  tr.solver_area_error = sol.discrete.max_area_error;
  tr.volume_k = k.volume();
  tr.volume_d_smooth = dhat.volume();
  tr.volume_d_polytope = sol.discrete.polytope().volume();
  tr.mixed_volume = 0.0;
  const auto& hd = dhat.support_expansion().coeffs;
  for (std::size_t i = 0; i < hd.size(); ++i) tr.mixed_volume += hd[i] * fd.coeffs[i] / 3.0;
  // V_1(D, D_hat)^3 >= |D|^2 |D_hat|
  tr.volume_d_bound = std::sqrt(std::pow(tr.mixed_volume, 3) / tr.volume_d_smooth);
  return {opt.mode, dhat, fd, eps, delta, tr};
}

}  // namespace projkit
