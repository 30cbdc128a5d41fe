#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "projkit/error.hpp"
#include "projkit/geometry/hull.hpp"
#include "projkit/sphere/fourier.hpp"
#include "projkit/sphere/harmonics.hpp"
#include "projkit/sphere/quadrature.hpp"

namespace projkit {

/// Default truncation degree for smooth representations.
inline constexpr int kDefaultDegree = 24;

// ---------------------------------------------------------------------------------------------
// Surface area measures

struct AtomicMeasure {
  int dimension = 0;
  std::vector<Vector> normals;
  std::vector<double> areas;

  double total() const {
    double s = 0.0;
    for (double a : areas) s += a;
    return s;
  }
  /// |sum A_i u_i| / sum A_i.
  double centroid_residual() const {
    Vector c = Vector::Zero(dimension);
    for (std::size_t i = 0; i < areas.size(); ++i) c += areas[i] * normals[i];
    return c.norm() / std::max(total(), 1e-300);
  }
};

/// Curvature function f_K of a smooth body in R^3, band-limited at degree 2L.
struct DensityMeasure {
  HarmonicExpansion density;
  double min_value = 0.0;  // minimum over the construction nodes
};

using SurfaceAreaMeasure = std::variant<AtomicMeasure, DensityMeasure>;

// ---------------------------------------------------------------------------------------------
// Polytope

/// Origin-symmetric polytope given by a vertex list closed under negation.
class Polytope {
 public:
  struct Facet {
    Vector normal;
    double offset = 0.0;
    double area = 0.0;
  };

  static Polytope from_vertices(std::vector<Vector> vertices) {
    if (vertices.empty()) throw Error(Errc::degenerate_body, "no vertices");
    const int n = static_cast<int>(vertices[0].size());
    if (n < 2) throw Error(Errc::dimension_mismatch, "polytopes need n >= 2");
    double scale = 0.0;
    for (const auto& v : vertices) {
      if (v.size() != n) throw Error(Errc::dimension_mismatch, "vertices of mixed dimension");
      scale = std::max(scale, v.cwiseAbs().maxCoeff());
    }
    const double tol = 1e-9 * std::max(scale, 1e-300);
    for (const auto& v : vertices) {
      const bool paired = std::any_of(vertices.begin(), vertices.end(),
                                      [&](const Vector& w) { return (v + w).cwiseAbs().maxCoeff() <= tol; });
      if (!paired) throw Error(Errc::symmetry_violation, "vertex list is not closed under negation");
    }
    auto data = std::make_shared<Data>();
    data->dimension = n;
    if (n == 3) {
      std::vector<Eigen::Vector3d> pts;
      pts.reserve(vertices.size());
      for (const auto& v : vertices) pts.emplace_back(v[0], v[1], v[2]);
      data->hull3 = geometry::convex_hull3(pts);
      for (int id : data->hull3.vertex_ids) data->vertices.push_back(vertices[id]);
      for (const auto& f : data->hull3.facets) data->facets.push_back({Vector(f.normal), f.offset, f.area});
      data->volume = data->hull3.volume;
    } else {
      const auto facets = geometry::facets_nd(vertices);
      if (facets.size() < static_cast<std::size_t>(n + 1))
        throw Error(Errc::degenerate_body, "vertices are not full-dimensional");
      std::vector<char> used(vertices.size(), 0);
      for (const auto& f : facets) {
        const Eigen::MatrixXd basis = geometry::complement_basis(f.normal);
        std::vector<Eigen::VectorXd> sub;
        for (int id : f.vertex_ids) sub.push_back(basis.transpose() * vertices[id]), used[id] = 1;
        const double area = geometry::hull_volume_nd(sub);
        data->facets.push_back({f.normal, f.offset, area});
        data->volume += f.offset * area / n;
      }
      for (std::size_t i = 0; i < vertices.size(); ++i)
        if (used[i]) data->vertices.push_back(vertices[i]);
    }
    for (const auto& f : data->facets)
      if (!(f.offset > 0.0)) throw Error(Errc::degenerate_body, "origin is not interior");
    if (!(data->volume > 0.0)) throw Error(Errc::degenerate_body, "zero volume");
    Polytope p;
    p.data_ = std::move(data);
    return p;
  }

  int dimension() const { return data_->dimension; }
  /// Extreme points only.
  const std::vector<Vector>& vertices() const { return data_->vertices; }
  const std::vector<Facet>& facets() const { return data_->facets; }
  double volume() const { return data_->volume; }
  /// Triangulated boundary; only for n = 3.
  const geometry::Hull3& hull3() const {
    if (data_->dimension != 3) throw Error(Errc::unsupported, "triangulated hull exists for n = 3 only");
    return data_->hull3;
  }

  double support(const Vector& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : data_->vertices) best = std::max(best, v.dot(x));
    return best;
  }

 private:
  struct Data {
    int dimension = 0;
    std::vector<Vector> vertices;
    std::vector<Facet> facets;
    geometry::Hull3 hull3;
    double volume = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------------------------
// Zonotope

/// Minkowski sum of the segments [-g_i, g_i].
class Zonotope {
 public:
  static Zonotope from_generators(std::vector<Vector> generators) {
    if (generators.empty()) throw Error(Errc::degenerate_body, "no generators");
    const int n = static_cast<int>(generators[0].size());
    if (n < 2) throw Error(Errc::dimension_mismatch, "zonotopes need n >= 2");
    Matrix g(n, static_cast<int>(generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (generators[i].size() != n) throw Error(Errc::dimension_mismatch, "generators of mixed dimension");
      g.col(static_cast<int>(i)) = generators[i];
    }
    Eigen::FullPivLU<Matrix> lu(g);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) throw Error(Errc::degenerate_body, "generators do not span R^n");
    Zonotope z;
    z.generators_ = std::move(generators);
    z.dimension_ = n;
    return z;
  }

  int dimension() const { return dimension_; }
  const std::vector<Vector>& generators() const { return generators_; }

  double support(const Vector& x) const {
    double s = 0.0;
    for (const auto& g : generators_) s += std::abs(g.dot(x));
    return s;
  }

  /// 2^n sum over n-subsets of |det|.
  double volume() const {
    const int n = dimension_;
    const int k = static_cast<int>(generators_.size());
    if (k < n) return 0.0;
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = i;
    double s = 0.0;
    Matrix m(n, n);
    do {
      for (int i = 0; i < n; ++i) m.col(i) = generators_[c[i]];
      s += std::abs(m.determinant());
    } while (geometry::detail::next_combination(c, k));
    return std::ldexp(s, n);
  }

  /// Equivalent vertex description (n = 3 through facet corners, otherwise all sign vectors).
  const Polytope& polytope() const {
    if (!cache_) cache_ = std::make_shared<Polytope>(build_polytope());
    return *cache_;
  }

 private:
  Polytope build_polytope() const {
    const int n = dimension_;
    const int k = static_cast<int>(generators_.size());
    std::vector<Vector> pts;
    if (n == 3) {
      double scale = 0.0;
      for (const auto& g : generators_) scale = std::max(scale, g.norm());
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const Eigen::Vector3d a = generators_[i].head<3>(), b = generators_[j].head<3>();
          Eigen::Vector3d nu = a.cross(b);
          if (nu.norm() <= 1e-12 * scale * scale) continue;
          nu.normalize();
          std::vector<int> in_plane;
          Vector center = Vector::Zero(3);
          for (int l = 0; l < k; ++l) {
            const double s = nu.dot(generators_[l].head<3>());
            if (std::abs(s) <= 1e-12 * scale)
              in_plane.push_back(l);
            else
              center += (s > 0 ? 1.0 : -1.0) * generators_[l];
          }
          if (in_plane.size() > 16) throw Error(Errc::unsupported, "too many coplanar generators");
          const int combos = 1 << in_plane.size();
          for (int mask = 0; mask < combos; ++mask) {
            Vector p = center;
            for (std::size_t l = 0; l < in_plane.size(); ++l)
              p += ((mask >> l) & 1 ? 1.0 : -1.0) * generators_[in_plane[l]];
            pts.push_back(p);
            pts.push_back(-p);
          }
        }
    } else {
      if (k > 16) throw Error(Errc::unsupported, "vertex enumeration limited to 16 generators");
      for (int mask = 0; mask < (1 << k); ++mask) {
        Vector p = Vector::Zero(n);
        for (int l = 0; l < k; ++l) p += ((mask >> l) & 1 ? 1.0 : -1.0) * generators_[l];
        pts.push_back(p);
      }
    }
    return Polytope::from_vertices(std::move(pts));
  }

  std::vector<Vector> generators_;
  int dimension_ = 0;
  mutable std::shared_ptr<const Polytope> cache_;
};

// ---------------------------------------------------------------------------------------------
// l_p ball

struct LpBall {
  int dimension = 3;
  double p = 2.0;  // in [1, inf]
  double radius = 1.0;

  static LpBall make(int n, double p, double radius = 1.0) {
    if (n < 2) throw Error(Errc::dimension_mismatch, "l_p balls need n >= 2");
    if (!(p >= 1.0)) throw Error(Errc::not_convex, "l_p ball requires p >= 1");
    if (!(radius > 0.0)) throw Error(Errc::degenerate_body, "radius must be positive");
    return {n, p, radius};
  }

  bool is_cube() const { return std::isinf(p); }
  bool is_cross_polytope() const { return p == 1.0; }
  bool is_euclidean() const { return p == 2.0; }

  /// Dual norm ||x||_q, 1/p + 1/q = 1, times the radius.
  double support(const Vector& x) const {
    if (p == 1.0) return radius * x.cwiseAbs().maxCoeff();
    if (std::isinf(p)) return radius * x.cwiseAbs().sum();
    if (p == 2.0) return radius * x.norm();
    const double q = p / (p - 1.0);
    const double top = x.cwiseAbs().maxCoeff();
    if (top == 0.0) return 0.0;
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / top, q);
    return radius * top * std::pow(s, 1.0 / q);
  }

  /// (2 Gamma(1 + 1/p))^n / Gamma(1 + n/p) r^n.
  double volume() const {
    const int n = dimension;
    if (std::isinf(p)) return std::pow(2.0 * radius, n);
    return std::exp(n * std::log(2.0 * radius) + n * std::lgamma(1.0 + 1.0 / p) - std::lgamma(1.0 + n / p));
  }

  /// Diagonal entry of the second-moment matrix.
  double second_moment() const {
    const int n = dimension;
    if (std::isinf(p)) return std::pow(2.0 * radius, n) * radius * radius / 3.0;
    const double ratio = std::exp(std::lgamma(3.0 / p) + std::lgamma(1.0 + n / p) - std::lgamma(1.0 / p) -
                                  std::lgamma(1.0 + (n + 2.0) / p));
    return volume() * radius * radius * ratio;
  }

  /// Vertex description for p = 1 and p = inf.
  Polytope polytope() const {
    std::vector<Vector> pts;
    const int n = dimension;
    if (p == 1.0) {
      for (int i = 0; i < n; ++i) {
        pts.push_back(radius * Vector::Unit(n, i));
        pts.push_back(-radius * Vector::Unit(n, i));
      }
    } else if (std::isinf(p)) {
      for (int mask = 0; mask < (1 << n); ++mask) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? radius : -radius;
        pts.push_back(v);
      }
    } else {
      throw Error(Errc::unsupported, "l_p ball is a polytope only for p = 1 or p = inf");
    }
    return Polytope::from_vertices(std::move(pts));
  }
};

// ---------------------------------------------------------------------------------------------
// Smooth body (n = 3)

/// Pointwise second-order data of a support function at a direction.
struct SupportJet {
  double h = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();  // boundary point with outer normal theta
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();   // of the 1-homogeneous extension
};

/// Support jet of H(x) = |x| G(x/|x|) at a unit theta, with G the polynomial extension:
///   grad H = grad G + (G - theta.grad G) theta
///   Hess H = P Hess G P + (G - theta.grad G) P,  P = I - theta theta^T
inline SupportJet support_jet(const HarmonicExpansion& h, const Eigen::Vector3d& theta) {
  const HarmonicJet j = jet(h, theta);
  const double radial = j.value - theta.dot(j.gradient);
  const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - theta * theta.transpose();
  SupportJet s;
  s.h = j.value;
  s.gradient = j.gradient + radial * theta;
  s.hessian = proj * j.hessian * proj + radial * proj;
  return s;
}

/// Eigenvalues (ascending) of the Hessian restricted to the tangent plane of theta.
inline std::pair<double, double> principal_radii(const Eigen::Matrix3d& hessian) {
  const double tr = hessian.trace();
  const double sq = hessian.squaredNorm();
  const double det = 0.5 * (tr * tr - sq);
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return {0.5 * tr - disc, 0.5 * tr + disc};
}

/// Rule used to build curvature densities of degree-L support functions.
inline const SphericalQuadrature& curvature_quadrature(int L) { return cached_quadrature(3, 4 * L + 2); }

/// Origin-symmetric body in R^3 with a band-limited support function.
class SmoothBody {
 public:
  /// Relative tolerance on the smallest principal radius.
  static constexpr double kConvexityTolerance = 1e-8;

  /// Validates h > 0 and convexity at every node of the curvature rule.
  static SmoothBody from_expansion(HarmonicExpansion h) {
    const int L = h.max_degree;
    const auto& quad = curvature_quadrature(L);
    std::vector<double> f(quad.size());
    double min_h = std::numeric_limits<double>::infinity(), max_h = 0.0;
    double min_radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const auto s = support_jet(h, quad.node3(i));
      const auto [lo, hi] = principal_radii(s.hessian);
      min_h = std::min(min_h, s.h);
      max_h = std::max(max_h, s.h);
      min_radius = std::min(min_radius, lo);
      f[i] = lo * hi;
    }
    if (!(min_h > 0.0)) throw Error(Errc::not_convex, "support function is not positive");
    if (min_radius < -kConvexityTolerance * max_h)
      throw Error(Errc::not_convex, "support Hessian has eigenvalue " + std::to_string(min_radius));
    SmoothBody b;
    auto data = std::make_shared<Data>();
    data->support = std::move(h);
    data->curvature.density = expand(quad, f, 2 * L);
    data->curvature.min_value = *std::min_element(f.begin(), f.end());
    data->min_support = min_h;
    data->max_support = max_h;
    data->min_radius = min_radius;
    b.data_ = std::move(data);
    return b;
  }

  int dimension() const { return 3; }
  int degree() const { return data_->support.max_degree; }
  const HarmonicExpansion& support_expansion() const { return data_->support; }
  const DensityMeasure& curvature() const { return data_->curvature; }
  double min_support() const { return data_->min_support; }
  double max_support() const { return data_->max_support; }
  double min_principal_radius() const { return data_->min_radius; }

  double support(const Vector& x) const {
    if (x.size() != 3) throw Error(Errc::dimension_mismatch, "smooth bodies live in R^3");
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    return r * evaluate(data_->support, Eigen::Vector3d(x / r));
  }

  /// Volume (1/3) int h f, exact by orthonormality.
  double volume() const {
    const auto& h = data_->support.coeffs;
    const auto& f = data_->curvature.density.coeffs;
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * f[i];
    return s / 3.0;
  }

  double surface_area() const { return data_->curvature.density.integral(); }

 private:
  struct Data {
    HarmonicExpansion support;
    DensityMeasure curvature;
    double min_support = 0.0, max_support = 0.0, min_radius = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------------------------
// Body

using Body = std::variant<Polytope, Zonotope, LpBall, SmoothBody>;

inline int dimension(const Body& body) {
  return std::visit([](const auto& b) -> int {
    if constexpr (std::is_same_v<std::decay_t<decltype(b)>, LpBall>)
      return b.dimension;
    else
      return b.dimension();
  }, body);
}

inline void require_dimension(const Body& body, int n) {
  if (dimension(body) != n) throw Error(Errc::dimension_mismatch, "direction and body dimensions differ");
}

/// h_K(x) for any x (1-homogeneous extension).
inline double support(const Body& body, const Vector& x) {
  require_dimension(body, static_cast<int>(x.size()));
  return std::visit([&](const auto& b) { return b.support(x); }, body);
}

inline double support(const Body& body, const Direction& theta) { return support(body, theta.coords()); }

inline std::string describe(const Body& body) {
  std::ostringstream os;
  std::visit([&](const auto& b) {
    using T = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<T, Polytope>)
      os << "polytope(n=" << b.dimension() << ", vertices=" << b.vertices().size() << ")";
    else if constexpr (std::is_same_v<T, Zonotope>)
      os << "zonotope(n=" << b.dimension() << ", generators=" << b.generators().size() << ")";
    else if constexpr (std::is_same_v<T, LpBall>)
      os << "lp_ball(n=" << b.dimension << ", p=" << b.p << ", r=" << b.radius << ")";
    else
      os << "smooth(L=" << b.degree() << ")";
  }, body);
  return os.str();
}

// ---------------------------------------------------------------------------------------------
// Surface area measures

inline AtomicMeasure surface_measure(const Polytope& p) {
  AtomicMeasure m;
  m.dimension = p.dimension();
  for (const auto& f : p.facets()) {
    m.normals.push_back(f.normal);
    m.areas.push_back(f.area);
  }
  return m;
}

/// One atom per facet normal; facets spanned by (n-1)-subsets of generators, coplanar groups merged.
inline AtomicMeasure surface_measure(const Zonotope& z) {
  const int n = z.dimension();
  const auto& g = z.generators();
  const int k = static_cast<int>(g.size());
  AtomicMeasure m;
  m.dimension = n;
  if (k < n - 1) throw Error(Errc::degenerate_body, "too few generators");
  std::vector<int> c(n - 1);
  for (int i = 0; i < n - 1; ++i) c[i] = i;
  double scale = 0.0;
  for (const auto& v : g) scale = std::max(scale, v.norm());
  Matrix sub(n, n - 1);
  do {
    for (int i = 0; i < n - 1; ++i) sub.col(i) = g[c[i]];
    // unit normal and (n-1)-volume of the parallelotope spanned by the subset
    Eigen::FullPivLU<Matrix> lu(sub.transpose());
    lu.setThreshold(1e-12);
    if (lu.rank() < n - 1) continue;
    Vector nu = lu.kernel().col(0).normalized();
    const double area = std::ldexp(std::sqrt(std::max(0.0, (sub.transpose() * sub).determinant())), n - 1);
    if (!(area > 1e-14 * std::pow(scale, n - 1))) continue;
    int pos = -1;
    for (std::size_t a = 0; a < m.normals.size(); ++a)
      if ((m.normals[a] - nu).norm() < 1e-10 || (m.normals[a] + nu).norm() < 1e-10) pos = static_cast<int>(a);
    if (pos < 0) {
      m.normals.push_back(nu);
      m.areas.push_back(area);
      m.normals.push_back(-nu);
      m.areas.push_back(area);
    } else {
      const int base = pos - pos % 2;
      m.areas[base] += area;
      m.areas[base + 1] += area;
    }
  } while (geometry::detail::next_combination(c, k));
  return m;
}

inline DensityMeasure curvature_density(const SmoothBody& body) { return body.curvature(); }

// ---------------------------------------------------------------------------------------------
// Smoothing

/// Exact expansion of h(theta) = sum |<theta, g_i>| via the Funk-Hecke formula:
/// <|theta.g|, Y_{m,k}> = |g| lambda_m Y_{m,k}(g/|g|).
inline HarmonicExpansion zonotope_support_expansion(const std::vector<Vector>& generators, int L) {
  const RealHarmonics& basis = harmonics(L);
  auto e = HarmonicExpansion::zero(L);
  std::vector<double> y(basis.size());
  for (const auto& g : generators) {
    const double len = g.norm();
    if (len == 0.0) continue;
    basis.values(Eigen::Vector3d(g.head<3>() / len), y);
    for (std::size_t i = 0; i < y.size(); ++i) e.coeffs[i] += len * y[i];
  }
  return e.scaled_by_degree([](int m) { return cosine_transform_multiplier(m); });
}

struct SmoothingOptions {
  int degree = kDefaultDegree;
  /// Apply the positive-kernel damping to support functions that are not band-limited.
  bool damping = true;
  /// Degree of the sampling rule for non-zonotopal bodies (0: max(8L, 200)).
  int sample_degree = 0;
};

/// Support expansion of a body at degree L, before damping.
inline HarmonicExpansion raw_support_expansion(const Body& body, const SmoothingOptions& opt) {
  const int L = opt.degree;
  if (dimension(body) != 3) throw Error(Errc::unsupported, "smoothing is implemented for n = 3");
  if (const auto* s = std::get_if<SmoothBody>(&body)) return s->support_expansion().resized(L);
  if (const auto* z = std::get_if<Zonotope>(&body)) return zonotope_support_expansion(z->generators(), L);
  if (const auto* b = std::get_if<LpBall>(&body)) {
    if (b->is_euclidean()) return HarmonicExpansion::constant(L, b->radius);
    if (b->is_cube()) {
      std::vector<Vector> gens;
      for (int i = 0; i < 3; ++i) gens.push_back(b->radius * Vector::Unit(3, i));
      return zonotope_support_expansion(gens, L);
    }
  }
  const int qd = opt.sample_degree > 0 ? opt.sample_degree : std::max(8 * L, 200);
  return expand_function([&](const Eigen::Vector3d& x) { return support(body, Vector(x)); }, L, qd);
}

/// Whether the body's support function is already band-limited at any degree.
inline bool band_limited(const Body& body) {
  if (std::holds_alternative<SmoothBody>(body)) return true;
  if (const auto* b = std::get_if<LpBall>(&body)) return b->is_euclidean();
  return false;
}

/// Smooth surrogate of a body: truncated (and, unless band-limited, damped) support expansion.
inline SmoothBody smooth(const Body& body, const SmoothingOptions& opt = {}) {
  HarmonicExpansion h = raw_support_expansion(body, opt);
  if (opt.damping && !band_limited(body)) h = fejer_damped(h);
  return SmoothBody::from_expansion(std::move(h));
}

inline SmoothBody smooth(const Body& body, int L) {
  SmoothingOptions opt;
  opt.degree = L;
  return smooth(body, opt);
}

/// Euclidean ball of radius r as a smooth body.
inline SmoothBody ball(double r = 1.0, int L = kDefaultDegree) {
  return SmoothBody::from_expansion(HarmonicExpansion::constant(L, r));
}

// ---------------------------------------------------------------------------------------------
// Linear images

/// T K. Polytopes and zonotopes map exactly; l_p balls only under scalar T; smooth bodies are
/// resampled through h_{TK}(theta) = h_K(T^t theta) and re-expanded at the same degree.
inline Body linear_image(const Body& body, const Matrix& t) {
  const int n = dimension(body);
  if (t.rows() != n || t.cols() != n) throw Error(Errc::dimension_mismatch, "transform size");
  if (std::abs(t.determinant()) <= 1e-300) throw Error(Errc::degenerate_body, "singular transform");
  if (const auto* p = std::get_if<Polytope>(&body)) {
    std::vector<Vector> v;
    for (const auto& x : p->vertices()) v.push_back(t * x);
    return Polytope::from_vertices(std::move(v));
  }
  if (const auto* z = std::get_if<Zonotope>(&body)) {
    std::vector<Vector> g;
    for (const auto& x : z->generators()) g.push_back(t * x);
    return Zonotope::from_generators(std::move(g));
  }
  if (const auto* b = std::get_if<LpBall>(&body)) {
    const double s = t(0, 0);
    if ((t - s * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12 * std::abs(s))
      throw Error(Errc::unsupported, "l_p balls admit only scalar transforms; smooth first");
    return LpBall::make(n, b->p, std::abs(s) * b->radius);
  }
  const auto& s = std::get<SmoothBody>(body);
  const int L = s.degree();
  const Matrix tt = t.transpose();
  auto h = expand_function([&](const Eigen::Vector3d& x) { return s.support(tt * Vector(x)); }, L,
                           std::max(8 * L, 200));
  return SmoothBody::from_expansion(std::move(h));
}

inline Body scaled(const Body& body, double s) {
  return linear_image(body, s * Matrix::Identity(dimension(body), dimension(body)));
}

}  // namespace projkit
