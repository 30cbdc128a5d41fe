#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "projkit/bodies.hpp"
#include "projkit/error.hpp"
#include "projkit/projections.hpp"

namespace projkit {

struct CovarianceResult {
  Matrix matrix;              // int_K x x^T dx
  double standard_error = 0;  // zero for exact evaluations
  std::string method;
};

/// Boundary form of the second moment for a smooth body:
///   int_K x x^T dx = (1/5) int_{S^2} grad H grad H^T h f dsigma,
/// from the divergence theorem with the field (x_i x_j) x; grad H(theta) is the boundary point.
inline Matrix smooth_second_moment(const SmoothBody& s) {
  const int L = s.degree();
  const auto& q = cached_quadrature(3, 5 * L + 2);
  const auto& f = s.curvature().density;
  const auto& fb = harmonics(f.max_degree);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Eigen::Vector3d th = q.node3(i);
    const auto j = support_jet(s.support_expansion(), th);
    const double w = q.weights[i] * j.h * fb.evaluate(th, f.coeffs);
    m += w * j.gradient * j.gradient.transpose();
  }
  return m / 5.0;
}

/// Exact second moment where a closed form or decomposition exists.
inline CovarianceResult covariance(const Body& body) {
  const int n = dimension(body);
  CovarianceResult r;
  if (const auto* p = std::get_if<Polytope>(&body)) {
    if (n != 3) throw Error(Errc::unsupported, "exact polytope moments are computed for n = 3");
    r.matrix = geometry::second_moment(p->hull3());
    r.method = "simplex decomposition";
  } else if (const auto* z = std::get_if<Zonotope>(&body)) {
    if (n != 3) throw Error(Errc::unsupported, "exact zonotope moments are computed for n = 3");
    r.matrix = geometry::second_moment(z->polytope().hull3());
    r.method = "simplex decomposition";
  } else if (const auto* b = std::get_if<LpBall>(&body)) {
    r.matrix = b->second_moment() * Matrix::Identity(n, n);
    r.method = "closed form";
  } else {
    r.matrix = smooth_second_moment(std::get<SmoothBody>(body));
    r.method = "boundary integral";
  }
  return r;
}

namespace detail {

/// Membership predicate and bounding half-widths for rejection sampling.
struct Membership {
  std::vector<Vector> normals;
  std::vector<double> offsets;
  const LpBall* ball = nullptr;
  Vector half_width;

  bool contains(const Vector& x) const {
    if (ball) {
      if (std::isinf(ball->p)) return x.cwiseAbs().maxCoeff() <= ball->radius;
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / ball->radius, ball->p);
      return s <= 1.0;
    }
    for (std::size_t i = 0; i < normals.size(); ++i)
      if (normals[i].dot(x) > offsets[i]) return false;
    return true;
  }
};

inline Membership membership(const Body& body, std::size_t smooth_directions) {
  Membership m;
  const int n = dimension(body);
  m.half_width.resize(n);
  for (int i = 0; i < n; ++i) m.half_width[i] = support(body, Vector(Vector::Unit(n, i)));
  auto add_facets = [&](const Polytope& p) {
    for (const auto& f : p.facets()) m.normals.push_back(f.normal), m.offsets.push_back(f.offset);
  };
  if (const auto* p = std::get_if<Polytope>(&body)) add_facets(*p);
  else if (const auto* z = std::get_if<Zonotope>(&body)) add_facets(z->polytope());
  else if (const auto* b = std::get_if<LpBall>(&body)) m.ball = b;
  else {
    // intersection of supporting half-spaces over a dense direction set (outer approximation)
    for (const auto& th : fibonacci_sphere(smooth_directions)) {
      m.normals.push_back(Vector(th));
      m.offsets.push_back(support(body, Vector(th)));
    }
  }
  return m;
}

}  // namespace detail

/// Rejection-sampling estimate of the second moment, split into independently seeded blocks.
/// Smooth bodies use an outer polyhedral approximation with `smooth_directions` half-spaces.
inline CovarianceResult covariance_monte_carlo(const Body& body, std::size_t samples, std::uint64_t seed,
                                               int blocks = 16, std::size_t smooth_directions = 20000) {
  const int n = dimension(body);
  const auto mem = detail::membership(body, smooth_directions);
  double box = 1.0;
  for (int i = 0; i < n; ++i) box *= 2.0 * mem.half_width[i];
  std::vector<Matrix> block_est;
  const std::size_t per_block = std::max<std::size_t>(1, samples / blocks);
  for (int b = 0; b < blocks; ++b) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(b)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix acc = Matrix::Zero(n, n);
    Vector x(n);
    for (std::size_t k = 0; k < per_block; ++k) {
      for (int i = 0; i < n; ++i) x[i] = mem.half_width[i] * u(rng);
      if (mem.contains(x)) acc += x * x.transpose();
    }
    block_est.push_back(acc * box / static_cast<double>(per_block));
  }
  CovarianceResult r;
  r.matrix = Matrix::Zero(n, n);
  for (const auto& e : block_est) r.matrix += e;
  r.matrix /= blocks;
  double var = 0.0;
  for (const auto& e : block_est) var += (e - r.matrix).squaredNorm();
  r.standard_error = std::sqrt(var / (blocks * (blocks - 1.0)));
  r.method = "monte carlo";
  return r;
}

struct IsotropicCertificate {
  Matrix transform;
  double isotropic_constant = 0.0;   // L_K
  double covariance_residual = 0.0;  // max |C - L^2 I| / L^2 for the image
  double volume_error = 0.0;         // | |TK| - 1 |
  std::string method;

  bool valid(double tol = 1e-3) const { return covariance_residual <= tol && volume_error <= 1e-6; }
};

struct IsotropicResult {
  Body body;
  IsotropicCertificate certificate;
};

/// T = s C^{-1/2} with s fixing |TK| = 1; the certificate is measured on TK itself.
inline IsotropicResult isotropize(const Body& body) {
  const int n = dimension(body);
  const auto cov = covariance(body);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov.matrix);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0))
    throw Error(Errc::degenerate_body, "covariance is not positive definite");
  Matrix t0;
  if ((cov.matrix - cov.matrix(0, 0) * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0)
    t0 = Matrix::Identity(n, n) / std::sqrt(cov.matrix(0, 0));
  else
    t0 = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  const double vol = volume(body);
  const double s = std::pow(std::abs(t0.determinant()) * vol, -1.0 / n);
  const Matrix t = s * t0;
  IsotropicResult r{linear_image(body, t), {}};
  const auto image_cov = covariance(r.body);
  const double l2 = image_cov.matrix.trace() / n;
  r.certificate.transform = t;
  r.certificate.isotropic_constant = std::sqrt(l2);
  r.certificate.covariance_residual = (image_cov.matrix - l2 * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() / l2;
  r.certificate.volume_error = std::abs(volume(r.body) - 1.0);
  r.certificate.method = image_cov.method;
  return r;
}

inline double isotropic_constant(const Body& body) { return isotropize(body).certificate.isotropic_constant; }

/// L of the Euclidean ball: the volume-one ball of radius r has L^2 = r^2 / (n + 2).
inline double ball_isotropic_constant(int n) {
  const double r = std::pow(ball_volume(n), -1.0 / n);
  return r / std::sqrt(n + 2.0);
}

}  // namespace projkit
