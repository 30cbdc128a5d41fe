#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "projkit/error.hpp"

namespace projkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Unit vector in R^n.
class Direction {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit Direction(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw Error(Errc::dimension_mismatch, "direction needs n >= 2");
    if (std::abs(coords_.norm() - 1.0) > kTolerance)
      throw Error(Errc::precondition, "direction is not a unit vector");
  }

  /// Normalizes an arbitrary nonzero vector.
  static Direction from(const Vector& v) {
    const double len = v.norm();
    if (!(len > 0.0)) throw Error(Errc::precondition, "cannot normalize the zero vector");
    return Direction(v / len);
  }

  int dimension() const { return static_cast<int>(coords_.size()); }
  const Vector& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  Direction operator-() const { return Direction(-coords_); }

 private:
  Vector coords_;
};

/// Surface area of S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the Euclidean unit ball B_2^n.
inline double ball_volume(int n) {
  return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

/// Nodes and positive weights on S^{n-1}, exact for polynomials of degree <= exact_degree.
/// The node set is closed under x -> -x; antipode[i] is the index of -nodes[i].
struct SphericalQuadrature {
  int dimension = 0;
  int exact_degree = 0;
  std::vector<Vector> nodes;
  std::vector<double> weights;
  std::vector<std::size_t> antipode;

  std::size_t size() const { return nodes.size(); }

  double integrate(std::span<const double> samples) const {
    if (samples.size() != nodes.size())
      throw Error(Errc::dimension_mismatch, "sample count differs from node count");
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += weights[i] * samples[i];
    return sum;
  }

  template <class F>
  double integrate_function(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }

  /// Node i as a 3-vector; only valid for dimension 3.
  Eigen::Vector3d node3(std::size_t i) const { return nodes[i].head<3>(); }
};

namespace detail {

/// P_n(z) and P_{n-1}(z) by the three-term recurrence (n >= 1).
inline std::pair<double, double> legendre_pair(int n, double z) {
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

/// Gauss-Legendre rule on [-1, 1] with npts nodes (Newton iteration on P_n).
inline void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w) {
  x.assign(npts, 0.0);
  w.assign(npts, 0.0);
  for (int i = 0; i < (npts + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, pm] = legendre_pair(npts, z);
      const double dz = p / (npts * (z * p - pm) / (z * z - 1.0));
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const auto [p, pm] = legendre_pair(npts, z);
    const double dp = npts * (z * p - pm) / (z * z - 1.0);
    x[i] = -z;
    x[npts - 1 - i] = z;
    w[i] = w[npts - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (npts % 2 == 1) x[npts / 2] = 0.0;
}

/// Gauss rule for the weight (1 - t^2)^{lambda - 1/2} on [-1, 1] (Golub-Welsch).
inline void gauss_gegenbauer(int npts, double lambda, std::vector<double>& x, std::vector<double>& w) {
  Matrix jacobi = Matrix::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    const double b = 0.5 * std::sqrt(k * (k + 2.0 * lambda - 1.0) / ((k + lambda) * (k + lambda - 1.0)));
    jacobi(k, k - 1) = jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(lambda + 0.5) / std::tgamma(lambda + 1.0);
  x.resize(npts);
  w.resize(npts);
  for (int i = 0; i < npts; ++i) {
    x[i] = eig.eigenvalues()[i];
    const double v0 = eig.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
  // symmetrize: the exact rule is symmetric, the eigen solver is only close to it
  for (int i = 0; i < npts / 2; ++i) {
    const double xs = 0.5 * (x[npts - 1 - i] - x[i]);
    const double ws = 0.5 * (w[i] + w[npts - 1 - i]);
    x[i] = -xs;
    x[npts - 1 - i] = xs;
    w[i] = w[npts - 1 - i] = ws;
  }
  if (npts % 2 == 1) x[npts / 2] = 0.0;
}

inline int even_at_least(int k) { return k % 2 == 0 ? k : k + 1; }

/// Per-ring rotation of the longitude grid. Rings at z and -z share an offset, which keeps
/// the rule antipodally symmetric while breaking the coplanarity of neighbouring rings.
inline double ring_offset(int ring, int rings, int nphi) {
  const int mirrored = std::min(ring, rings - 1 - ring);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const double frac = std::fmod(0.5 + mirrored * golden, 1.0);
  return frac * 2.0 * std::numbers::pi / nphi;
}

inline SphericalQuadrature build_s2(int degree) {
  SphericalQuadrature q;
  q.dimension = 3;
  q.exact_degree = degree;
  const int rings = degree / 2 + 1;
  const int nphi = even_at_least(degree + 1);
  std::vector<double> z, wz;
  gauss_legendre(rings, z, wz);
  q.nodes.reserve(static_cast<std::size_t>(rings) * nphi);
  for (int i = 0; i < rings; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    const double offset = ring_offset(i, rings, nphi);
    for (int j = 0; j < nphi; ++j) {
      const double phi = offset + 2.0 * std::numbers::pi * j / nphi;
      Vector v(3);
      v << s * std::cos(phi), s * std::sin(phi), z[i];
      v.normalize();
      q.nodes.push_back(std::move(v));
      q.weights.push_back(wz[i] * 2.0 * std::numbers::pi / nphi);
    }
  }
  q.antipode.resize(q.nodes.size());
  for (int i = 0; i < rings; ++i)
    for (int j = 0; j < nphi; ++j)
      q.antipode[static_cast<std::size_t>(i) * nphi + j] =
          static_cast<std::size_t>(rings - 1 - i) * nphi + (j + nphi / 2) % nphi;
  return q;
}

/// Recursive product rule: x = (t, sqrt(1 - t^2) y), y on S^{n-2}.
inline SphericalQuadrature build_recursive(int n, int degree) {
  SphericalQuadrature q;
  q.dimension = n;
  q.exact_degree = degree;
  if (n == 2) {
    const int nphi = even_at_least(degree + 1);
    for (int j = 0; j < nphi; ++j) {
      const double phi = (j + 0.5) * 2.0 * std::numbers::pi / nphi;
      Vector v(2);
      v << std::cos(phi), std::sin(phi);
      q.nodes.push_back(std::move(v));
      q.weights.push_back(2.0 * std::numbers::pi / nphi);
      q.antipode.push_back((j + nphi / 2) % nphi);
    }
    return q;
  }
  const SphericalQuadrature lower = build_recursive(n - 1, degree);
  const int npts = degree / 2 + 1;
  std::vector<double> t, wt;
  if (n == 3)
    gauss_legendre(npts, t, wt);
  else
    gauss_gegenbauer(npts, 0.5 * (n - 2), t, wt);
  const std::size_t m = lower.size();
  for (int i = 0; i < npts; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (std::size_t j = 0; j < m; ++j) {
      Vector v(n);
      v[0] = t[i];
      v.tail(n - 1) = s * lower.nodes[j];
      v.normalize();
      q.nodes.push_back(std::move(v));
      q.weights.push_back(wt[i] * lower.weights[j]);
      q.antipode.push_back(static_cast<std::size_t>(npts - 1 - i) * m + lower.antipode[j]);
    }
  }
  return q;
}

}  // namespace detail

/// Builds a symmetric rule on S^{n-1} exact through polynomial degree `exact_degree`.
/// n = 3 uses Gauss-Legendre in z times a rotated trapezoid rule in longitude; n > 3 uses a
/// recursive Gauss-Gegenbauer product (exact as well, with d^{n-1} growth in node count).
inline SphericalQuadrature build_quadrature(int dimension, int exact_degree) {
  if (dimension < 2) throw Error(Errc::unsupported, "quadrature needs n >= 2");
  if (exact_degree < 2) throw Error(Errc::precondition, "quadrature degree must be >= 2");
  if (dimension == 3) return detail::build_s2(exact_degree);
  return detail::build_recursive(dimension, exact_degree);
}

/// Process-wide cache; returned references stay valid for the program lifetime.
inline const SphericalQuadrature& cached_quadrature(int dimension, int exact_degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<SphericalQuadrature>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dimension, exact_degree}];
  if (!slot) slot = std::make_unique<SphericalQuadrature>(build_quadrature(dimension, exact_degree));
  return *slot;
}

/// Near-uniform Fibonacci point set on S^2 (not antipodally symmetric).
inline std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

/// Typical angular spacing of `count` near-uniform points on S^2.
inline double grid_spacing(std::size_t count) {
  return std::sqrt(4.0 * std::numbers::pi / static_cast<double>(count));
}

}  // namespace projkit
