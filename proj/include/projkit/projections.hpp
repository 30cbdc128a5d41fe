#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "projkit/bodies.hpp"
#include "projkit/error.hpp"
#include "projkit/geometry/hull.hpp"
#include "projkit/sphere/fourier.hpp"
#include "projkit/sphere/harmonics.hpp"
#include "projkit/sphere/quadrature.hpp"

namespace projkit {

namespace detail {

inline void require_unit(const Body& body, const Direction& xi) {
  if (xi.dimension() != dimension(body)) throw Error(Errc::dimension_mismatch, "direction dimension");
}

/// Orthonormal frame (a, b) of the plane orthogonal to xi in R^3.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> plane_frame(const Eigen::Vector3d& xi) {
  const Eigen::Vector3d seed = std::abs(xi.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d a = (seed - seed.dot(xi) * xi).normalized();
  return {a, xi.cross(a)};
}

/// Shadow polygon of a vertex set on xi^perp (n = 3), counter-clockwise.
inline std::vector<Eigen::Vector2d> shadow_polygon(const std::vector<Vector>& vertices, const Eigen::Vector3d& xi) {
  const auto [a, b] = plane_frame(xi);
  std::vector<Eigen::Vector2d> q;
  q.reserve(vertices.size());
  for (const auto& v : vertices) q.emplace_back(a.dot(v.head<3>()), b.dot(v.head<3>()));
  return geometry::convex_hull2(std::move(q));
}

/// Area of the planar convex set with support values h_k in directions at angles 2 pi k / N,
/// as the polygon cut out by those half-planes.
inline std::vector<Eigen::Vector2d> halfplane_polygon(const std::vector<double>& h) {
  const std::size_t n = h.size();
  std::vector<Eigen::Vector2d> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n;
    pts.emplace_back(std::cos(phi) / h[k], std::sin(phi) / h[k]);
  }
  // polar of the dual hull: each dual edge gives one primal vertex
  const auto dual = geometry::convex_hull2(pts);
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = 0; i < dual.size(); ++i) {
    const auto& p = dual[i];
    const auto& q = dual[(i + 1) % dual.size()];
    Eigen::Matrix2d m;
    m << p.x(), p.y(), q.x(), q.y();
    out.push_back(m.partialPivLu().solve(Eigen::Vector2d(1.0, 1.0)));
  }
  return out;
}

inline constexpr int kLpShadowSamples = 4096;

inline std::vector<double> lp_shadow_support(const LpBall& b, const Eigen::Vector3d& xi) {
  const auto [a, c] = plane_frame(xi);
  std::vector<double> h(kLpShadowSamples);
  for (int k = 0; k < kLpShadowSamples; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / kLpShadowSamples;
    h[k] = b.support(Vector(std::cos(phi) * a + std::sin(phi) * c));
  }
  return h;
}

/// Representative of {xi, -xi}; makes every evaluator exactly even.
inline Direction canonical(const Direction& xi) {
  for (int i = 0; i < xi.dimension(); ++i) {
    if (xi[i] > 0.0) return xi;
    if (xi[i] < 0.0) return -xi;
  }
  return xi;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Projection function evaluators

/// Evaluator (a): volume of the projected vertex hull; n = 3..6.
inline double projection_shadow(const Polytope& p, const Direction& xi) {
  const int n = p.dimension();
  if (xi.dimension() != n) throw Error(Errc::dimension_mismatch, "direction dimension");
  if (n == 3) return geometry::polygon_area(detail::shadow_polygon(p.vertices(), xi.coords().head<3>()));
  if (n > 6) throw Error(Errc::unsupported, "exact shadows are computed for n <= 6");
  const Matrix basis = geometry::complement_basis(xi.coords());
  std::vector<Vector> q;
  for (const auto& v : p.vertices()) q.push_back(basis.transpose() * v);
  return geometry::hull_volume_nd(q);
}

/// Evaluator (b), atomic: (1/2) sum |<xi, u_i>| A_i.
inline double projection_cauchy(const AtomicMeasure& m, const Direction& xi) {
  if (xi.dimension() != m.dimension) throw Error(Errc::dimension_mismatch, "direction dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < m.areas.size(); ++i) s += std::abs(xi.coords().dot(m.normals[i])) * m.areas[i];
  return 0.5 * s;
}

/// Expansion of P_K = (1/2) cosine transform of f_K; band-limited at the density's degree.
inline HarmonicExpansion projection_expansion(const DensityMeasure& m) {
  return 0.5 * m.density.scaled_by_degree([](int deg) { return cosine_transform_multiplier(deg); });
}

/// Evaluator (b), density.
inline double projection_cauchy(const DensityMeasure& m, const Direction& xi) {
  return evaluate(projection_expansion(m), xi);
}

/// Evaluator (c): 2^{n-1} sum over (n-1)-subsets S of |det[xi, g_S]|.
inline double projection_determinant(const Zonotope& z, const Direction& xi) {
  const int n = z.dimension();
  if (xi.dimension() != n) throw Error(Errc::dimension_mismatch, "direction dimension");
  const auto& g = z.generators();
  const int k = static_cast<int>(g.size());
  std::vector<int> c(n - 1);
  for (int i = 0; i < n - 1; ++i) c[i] = i;
  Matrix m(n, n);
  m.col(0) = xi.coords();
  double s = 0.0;
  do {
    for (int i = 0; i < n - 1; ++i) m.col(i + 1) = g[c[i]];
    s += std::abs(m.determinant());
  } while (geometry::detail::next_combination(c, k));
  return std::ldexp(s, n - 1);
}

/// Shadow area of a smooth body from its support function on the great circle xi^perp:
/// (1/2) int (h^2 - h'^2) dphi, exact for band-limited h with 4L + 8 equispaced samples.
inline double projection_shadow(const SmoothBody& body, const Direction& xi) {
  if (xi.dimension() != 3) throw Error(Errc::dimension_mismatch, "direction dimension");
  const auto [a, b] = detail::plane_frame(xi.coords().head<3>());
  const int samples = 4 * body.degree() + 8;
  const auto& basis = harmonics(body.degree());
  const auto& coeffs = body.support_expansion().coeffs;
  double s = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / samples;
    const Eigen::Vector3d u = std::cos(phi) * a + std::sin(phi) * b;
    const Eigen::Vector3d du = -std::sin(phi) * a + std::cos(phi) * b;
    const auto j = basis.jet(u, coeffs);
    const double dh = j.gradient.dot(du);
    s += j.value * j.value - dh * dh;
  }
  return 0.5 * s * 2.0 * std::numbers::pi / samples;
}

/// P_K(xi) with the most exact evaluator available for the representation.
inline double projection_function(const Body& body, const Direction& direction) {
  detail::require_unit(body, direction);
  const Direction xi = detail::canonical(direction);
  const int n = dimension(body);
  return std::visit([&](const auto& b) -> double {
    using T = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<T, Polytope>) {
      if (n <= 6) return projection_shadow(b, xi);
      return projection_cauchy(surface_measure(b), xi);
    } else if constexpr (std::is_same_v<T, Zonotope>) {
      return projection_determinant(b, xi);
    } else if constexpr (std::is_same_v<T, LpBall>) {
      if (b.is_euclidean()) return ball_volume(n - 1) * std::pow(b.radius, n - 1);
      if (b.is_cube() || b.is_cross_polytope()) return projection_shadow(b.polytope(), xi);
      if (n != 3) throw Error(Errc::unsupported, "l_p shadows are computed for n = 3");
      return geometry::polygon_area(detail::halfplane_polygon(detail::lp_shadow_support(b, xi.coords().head<3>())));
    } else {
      return projection_cauchy(b.curvature(), xi);
    }
  }, body);
}

// ---------------------------------------------------------------------------------------------
// Volumes, surface area, mixed volume

inline double volume(const Body& body) {
  return std::visit([](const auto& b) { return b.volume(); }, body);
}

/// Mean of P over the sphere is S / 4 in R^3; used for l_p balls without a closed form.
inline double lp_surface_area_by_cauchy(const LpBall& b) {
  const auto& q = cached_quadrature(3, 40);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * projection_function(b, Direction(q.nodes[i]));
  return s / std::numbers::pi;
}

inline double surface_area(const Body& body) {
  const int n = dimension(body);
  return std::visit([&](const auto& b) -> double {
    using T = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<T, Polytope> || std::is_same_v<T, Zonotope>) {
      return surface_measure(b).total();
    } else if constexpr (std::is_same_v<T, LpBall>) {
      if (b.is_euclidean()) return sphere_area(n) * std::pow(b.radius, n - 1);
      if (b.is_cube() || b.is_cross_polytope()) return surface_measure(b.polytope()).total();
      if (n != 3) throw Error(Errc::unsupported, "l_p surface area is computed for n = 3");
      return lp_surface_area_by_cauchy(b);
    } else {
      return b.surface_area();
    }
  }, body);
}

/// V_1(K, L) = (1/n) int h_L dS(K, .).
inline double mixed_volume_v1(const Body& k, const Body& l) {
  const int n = dimension(k);
  if (dimension(l) != n) throw Error(Errc::dimension_mismatch, "bodies of different dimension");
  auto atomic = [&](const AtomicMeasure& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.areas.size(); ++i) s += m.areas[i] * support(l, m.normals[i]);
    return s / n;
  };
  if (const auto* p = std::get_if<Polytope>(&k)) return atomic(surface_measure(*p));
  if (const auto* z = std::get_if<Zonotope>(&k)) return atomic(surface_measure(*z));
  if (const auto* b = std::get_if<LpBall>(&k)) {
    if (b->is_cube() || b->is_cross_polytope()) return atomic(surface_measure(b->polytope()));
    if (b->is_euclidean() && n == 3) {
      const auto& q = cached_quadrature(3, 200);
      const double r2 = b->radius * b->radius;
      if (const auto* ls = std::get_if<SmoothBody>(&l)) return r2 * ls->support_expansion().integral() / 3.0;
      return r2 * q.integrate_function([&](const Vector& x) { return support(l, x); }) / 3.0;
    }
    throw Error(Errc::unsupported, "mixed volume of this l_p ball needs a smooth surrogate");
  }
  const auto& s = std::get<SmoothBody>(k);
  const auto& f = s.curvature().density;
  if (const auto* ls = std::get_if<SmoothBody>(&l)) {
    const auto& h = ls->support_expansion().coeffs;
    double acc = 0.0;
    for (std::size_t i = 0; i < std::min(h.size(), f.coeffs.size()); ++i) acc += h[i] * f.coeffs[i];
    return acc / 3.0;
  }
  if (const auto* lb = std::get_if<LpBall>(&l); lb && lb->is_euclidean()) return lb->radius * f.integral() / 3.0;
  const auto& q = cached_quadrature(3, std::max(2 * f.max_degree + 2, 300));
  const auto fs = sample(f, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += q.weights[i] * fs[i] * support(l, q.nodes[i]);
  return acc / 3.0;
}

// ---------------------------------------------------------------------------------------------
// Steiner polynomial (n = 3)

/// |K + eps B| = volume + surface eps + mean eps^2 + (4 pi / 3) eps^3.
struct SteinerCoefficients {
  double volume = 0.0;
  double surface = 0.0;
  double mean = 0.0;  // int h dsigma / ... = (1/2) sum edge length x exterior angle for polytopes
  double ball = 4.0 * std::numbers::pi / 3.0;

  double at(double eps) const { return volume + eps * (surface + eps * (mean + eps * ball)); }
};

inline SteinerCoefficients steiner_coefficients(const Polytope& p) {
  const auto& h = p.hull3();
  SteinerCoefficients c;
  c.volume = h.volume;
  c.surface = h.area;
  for (const auto& e : h.edges) c.mean += 0.5 * e.length * e.exterior_angle;
  return c;
}

/// For a smooth body the quadratic coefficient is int h dsigma (mean width term).
inline SteinerCoefficients steiner_coefficients(const SmoothBody& s) {
  SteinerCoefficients c;
  c.volume = s.volume();
  c.surface = s.surface_area();
  c.mean = s.support_expansion().integral();
  return c;
}

inline SteinerCoefficients steiner_coefficients(const Body& body) {
  if (dimension(body) != 3) throw Error(Errc::unsupported, "Steiner polynomial is computed for n = 3");
  if (const auto* p = std::get_if<Polytope>(&body)) return steiner_coefficients(*p);
  if (const auto* z = std::get_if<Zonotope>(&body)) return steiner_coefficients(z->polytope());
  if (const auto* s = std::get_if<SmoothBody>(&body)) return steiner_coefficients(*s);
  const auto& b = std::get<LpBall>(body);
  if (b.is_cube() || b.is_cross_polytope()) return steiner_coefficients(b.polytope());
  if (b.is_euclidean()) {
    const double r = b.radius;
    return {4.0 * std::numbers::pi / 3.0 * r * r * r, 4.0 * std::numbers::pi * r * r, 4.0 * std::numbers::pi * r};
  }
  throw Error(Errc::unsupported, "Steiner polynomial of this l_p ball needs a smooth surrogate");
}

/// Parallel-body volumes |K + eps B| for each eps.
inline std::vector<double> steiner_profile(const Body& body, const std::vector<double>& eps) {
  for (double e : eps)
    if (!(e >= 0.0)) throw Error(Errc::precondition, "parallel distance must be non-negative");
  if (const auto* s = std::get_if<SmoothBody>(&body)) {
    // h_{K + eps B} = h_K + eps; volume through the smooth pipeline
    std::vector<double> out;
    for (double e : eps)
      out.push_back(SmoothBody::from_expansion(s->support_expansion() +
                                               HarmonicExpansion::constant(s->degree(), e)).volume());
    return out;
  }
  const auto c = steiner_coefficients(body);
  std::vector<double> out;
  for (double e : eps) out.push_back(c.at(e));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Shadow perimeter (n = 3): surface area of the projection within xi^perp

inline double shadow_perimeter(const Body& body, const Direction& xi) {
  detail::require_unit(body, xi);
  if (dimension(body) != 3) throw Error(Errc::unsupported, "shadow perimeter is computed for n = 3");
  const Eigen::Vector3d x = xi.coords().head<3>();
  if (const auto* p = std::get_if<Polytope>(&body)) return geometry::polygon_perimeter(detail::shadow_polygon(p->vertices(), x));
  if (const auto* z = std::get_if<Zonotope>(&body)) {
    double s = 0.0;
    for (const auto& g : z->generators()) s += (g.head<3>() - g.head<3>().dot(x) * x).norm();
    return 4.0 * s;
  }
  if (const auto* b = std::get_if<LpBall>(&body)) {
    if (b->is_euclidean()) return 2.0 * std::numbers::pi * b->radius;
    if (b->is_cube() || b->is_cross_polytope())
      return geometry::polygon_perimeter(detail::shadow_polygon(b->polytope().vertices(), x));
    return geometry::polygon_perimeter(detail::halfplane_polygon(detail::lp_shadow_support(*b, x)));
  }
  // Cauchy in the plane: perimeter = int_0^{2 pi} h dphi, exact with 2L + 2 samples
  const auto& s = std::get<SmoothBody>(body);
  const auto [a, c] = detail::plane_frame(x);
  const int samples = 2 * s.degree() + 4;
  double acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / samples;
    acc += evaluate(s.support_expansion(), Eigen::Vector3d(std::cos(phi) * a + std::sin(phi) * c));
  }
  return acc * 2.0 * std::numbers::pi / samples;
}

// ---------------------------------------------------------------------------------------------
// Projection body

/// Pi K: support function P_K. Polytopes give a zonotope with one generator A_i u_i per pair of
/// opposite facets (the two half-weight segments of the pair coincide).
inline Body projection_body(const Body& body) {
  auto from_atoms = [](const AtomicMeasure& m) {
    std::vector<Vector> gens;
    std::vector<char> taken(m.areas.size(), 0);
    for (std::size_t i = 0; i < m.areas.size(); ++i) {
      if (taken[i]) continue;
      taken[i] = 1;
      double w = 0.5 * m.areas[i];
      for (std::size_t j = i + 1; j < m.areas.size(); ++j)
        if (!taken[j] && (m.normals[i] + m.normals[j]).norm() < 1e-9) {
          w += 0.5 * m.areas[j];
          taken[j] = 1;
          break;
        }
      gens.push_back(w * m.normals[i]);
    }
    return Zonotope::from_generators(std::move(gens));
  };
  if (const auto* p = std::get_if<Polytope>(&body)) return from_atoms(surface_measure(*p));
  if (const auto* z = std::get_if<Zonotope>(&body)) return from_atoms(surface_measure(*z));
  if (const auto* b = std::get_if<LpBall>(&body)) {
    const int n = b->dimension;
    if (b->is_euclidean()) return LpBall::make(n, 2.0, ball_volume(n - 1) * std::pow(b->radius, n - 1));
    if (b->is_cube() || b->is_cross_polytope()) return from_atoms(surface_measure(b->polytope()));
    throw Error(Errc::unsupported, "projection body of this l_p ball needs a smooth surrogate");
  }
  const auto& s = std::get<SmoothBody>(body);
  return SmoothBody::from_expansion(projection_expansion(s.curvature()));
}

}  // namespace projkit
