#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "projkit/bodies.hpp"
#include "projkit/isotropic.hpp"
#include "projkit/projections.hpp"
#include "projkit/sphere/fourier.hpp"
#include "projkit/sphere/harmonics.hpp"

namespace projkit {

/// c_n = |B^n|^{(n-1)/n} / |B^{n-1}|.
inline double c_n(int n) {
  return std::exp((n - 1.0) / n * std::log(ball_volume(n)) - std::log(ball_volume(n - 1)));
}

/// Expansion of (h_K r)^ on S^2.
inline HarmonicExpansion support_transform(const SmoothBody& body) {
  return homogeneous_fourier(body.support_expansion(), HomogeneousDegree::support());
}

/// Expansion of (f_K r^{-4})^ on S^2; equals -pi P_K.
inline HarmonicExpansion curvature_transform(const SmoothBody& body) {
  return homogeneous_fourier(body.curvature().density, HomogeneousDegree::curvature(3));
}

// ---------------------------------------------------------------------------------------------
// Projection-body criterion

enum class ZonoidVerdict { certified_yes, certified_no, inconclusive };

inline const char* to_string(ZonoidVerdict v) {
  switch (v) {
    case ZonoidVerdict::certified_yes: return "certified_yes";
    case ZonoidVerdict::certified_no: return "certified_no";
    case ZonoidVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

/// Symmetric cap pair {theta : angle(theta, +-center) < radius} inside the positivity set.
struct WitnessCap {
  Eigen::Vector3d center = Eigen::Vector3d::UnitZ();
  double radius = 0.0;     // verified cap radius
  double inradius = 0.0;   // grid estimate of the component's inradius at the center
  std::size_t grid_nodes = 0;  // grid points in Omega
};

struct ZonoidClassification {
  ZonoidVerdict verdict = ZonoidVerdict::inconclusive;
  double sup_norm = 0.0;   // max |(h r)^| over the grid
  double max_value = 0.0;  // max (h r)^ over the grid
  double excursion = 0.0;  // max_value / sup_norm
  double tol = 0.0;
  double grid_spacing = 0.0;
  std::optional<WitnessCap> witness;
  std::string reason;
};

struct ZonoidOptions {
  double tol = 1e-6;
  std::size_t grid = 2000;
  /// A witness cap must have radius >= cap_factor x grid spacing.
  double cap_factor = 2.0;
};

namespace detail {

inline double line_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::acos(std::min(1.0, std::abs(a.dot(b))));
}

/// Points on circles of radius r' <= r around c, spaced at most `step` apart.
inline std::vector<Eigen::Vector3d> cap_points(const Eigen::Vector3d& c, double r, double step) {
  const auto [a, b] = plane_frame(c);
  std::vector<Eigen::Vector3d> pts{c};
  const int rings = std::max(1, static_cast<int>(std::ceil(r / step)));
  for (int i = 1; i <= rings; ++i) {
    const double rho = r * i / rings;
    const int count = std::max(6, static_cast<int>(std::ceil(2.0 * std::numbers::pi * std::sin(rho) / step)));
    for (int k = 0; k < count; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / count;
      pts.push_back(std::cos(rho) * c + std::sin(rho) * (std::cos(phi) * a + std::sin(phi) * b));
    }
  }
  return pts;
}

}  // namespace detail

/// Evaluates the sign of (h_K r)^ on a Fibonacci grid: yes if max <= tol sup, no if max > 10 tol sup
/// and the positivity set contains a cap of radius >= cap_factor x spacing, inconclusive otherwise.
inline ZonoidClassification is_projection_body(const SmoothBody& body, const ZonoidOptions& opt = {}) {
  const auto g = support_transform(body);
  const auto& basis = harmonics(g.max_degree);
  const auto grid = fibonacci_sphere(opt.grid);
  std::vector<double> val(grid.size());
  ZonoidClassification out;
  out.tol = opt.tol;
  out.grid_spacing = grid_spacing(opt.grid);
  out.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    val[i] = basis.evaluate(grid[i], g.coeffs);
    out.sup_norm = std::max(out.sup_norm, std::abs(val[i]));
    out.max_value = std::max(out.max_value, val[i]);
  }
  out.excursion = out.max_value / out.sup_norm;
  if (out.excursion <= opt.tol) {
    out.verdict = ZonoidVerdict::certified_yes;
    out.reason = "transform non-positive on the grid";
    return out;
  }
  if (out.excursion <= 10.0 * opt.tol) {
    out.reason = "positive excursion inside the inconclusive band";
    return out;
  }
  const double level = opt.tol * out.sup_norm;
  std::vector<std::size_t> inside, outside;
  for (std::size_t i = 0; i < grid.size(); ++i) (val[i] > level ? inside : outside).push_back(i);
  // deepest grid point of Omega
  std::size_t best = inside.front();
  double depth = -1.0;
  for (std::size_t i : inside) {
    double d = std::numbers::pi / 2.0;
    for (std::size_t j : outside) d = std::min(d, detail::line_angle(grid[i], grid[j]));
    if (d > depth) depth = d, best = i;
  }
  WitnessCap cap;
  cap.center = grid[best];
  cap.inradius = depth;
  cap.grid_nodes = inside.size();
  double r = depth - out.grid_spacing;
  const double need = opt.cap_factor * out.grid_spacing;
  while (r >= need) {
    bool ok = true;
    for (const auto& x : detail::cap_points(cap.center, r, 0.25 * out.grid_spacing))
      if (basis.evaluate(x, g.coeffs) <= level) {
        ok = false;
        break;
      }
    if (ok) break;
    r *= 0.9;
  }
  if (r < need) {
    out.reason = "positivity set contains no cap of the required radius";
    return out;
  }
  cap.radius = r;
  out.witness = cap;
  out.verdict = ZonoidVerdict::certified_no;
  out.reason = "transform positive on a cap";
  return out;
}

// ---------------------------------------------------------------------------------------------
// Curvature-transform identity

struct CurvatureIdentityRecord {
  double sup_residual = 0.0;   // sup |(f r^-4)^ + pi P_K|
  double sup_projection = 0.0; // sup P_K
  double relative_band = 0.0;  // sup_residual / sup_projection
  std::size_t directions = 0;
};

/// Compares the Fourier side with P_K measured by `reference` on a Fibonacci grid.
template <class Reference>
CurvatureIdentityRecord curvature_identity_against(const SmoothBody& body, Reference&& reference, std::size_t grid = 2000) {
  const auto t = curvature_transform(body);
  CurvatureIdentityRecord r;
  r.directions = grid;
  for (const auto& x : fibonacci_sphere(grid)) {
    const double p = reference(Direction(Vector(x)));
    r.sup_residual = std::max(r.sup_residual, std::abs(evaluate(t, x) + std::numbers::pi * p));
    r.sup_projection = std::max(r.sup_projection, p);
  }
  r.relative_band = r.sup_residual / r.sup_projection;
  return r;
}

/// Default reference: the shadow area computed from the support function on great circles.
inline CurvatureIdentityRecord curvature_identity(const SmoothBody& body, std::size_t grid = 2000) {
  return curvature_identity_against(body, [&](const Direction& xi) { return projection_shadow(body, xi); }, grid);
}

// ---------------------------------------------------------------------------------------------
// Integral estimates

struct IntegralBoundRecord {
  double lhs = 0.0;    // int (h r)^ dxi = mu(3,1,0) int h
  double rhs = 0.0;    // -(2 pi)^3 (3 / pi) c_3 |K|^{1/3}
  double slack = 0.0;  // lhs - rhs, must be <= 0
  double volume = 0.0;
  bool holds = false;
};

inline IntegralBoundRecord integral_lower_bound(const SmoothBody& body, double tol = 1e-9) {
  IntegralBoundRecord r;
  r.lhs = support_transform(body).integral();
  r.volume = body.volume();
  r.rhs = -std::pow(2.0 * std::numbers::pi, 3) * 3.0 / std::numbers::pi * c_n(3) * std::cbrt(r.volume);
  r.slack = r.lhs - r.rhs;
  r.holds = r.slack <= tol * std::abs(r.rhs);
  return r;
}

struct MeanWidthRecord {
  double mean_width = 0.0;  // (1 / |S^2|) int h
  double isotropic_constant = 0.0;
  double volume = 0.0;
  double ratio = 0.0;       // mean_width / (sqrt(n) log^2(1+n) L_K |K|^{1/n})
  double covariance_residual = 0.0;
};

/// Requires K = t K_0 with K_0 isotropic; checked through the covariance of K.
inline MeanWidthRecord mean_width_bound(const SmoothBody& body, double isotropy_tol = 1e-3) {
  const auto cov = covariance(body).matrix;
  const double d = cov.trace() / 3.0;
  const double resid = (cov - d * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() / d;
  if (resid > isotropy_tol) throw Error(Errc::precondition, "body is not isotropic up to dilation");
  MeanWidthRecord r;
  r.volume = body.volume();
  r.covariance_residual = resid;
  // L_K of the volume-one dilate: cov scales by t^5, volume by t^3
  r.isotropic_constant = std::sqrt(d / std::pow(r.volume, 5.0 / 3.0));
  r.mean_width = body.support_expansion().integral() / (4.0 * std::numbers::pi);
  const double l = std::log(4.0);
  r.ratio = r.mean_width / (std::sqrt(3.0) * l * l * r.isotropic_constant * std::cbrt(r.volume));
  return r;
}

}  // namespace projkit
