#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "projkit/sphere/quadrature.hpp"

namespace projkit {

struct SphereExtremum {
  double value = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  double grid_value = 0.0;  // best value on the grid before refinement
  std::size_t evaluations = 0;
};

struct ExtremumOptions {
  std::size_t grid = 2000;
  /// Grid candidates refined by Nelder-Mead.
  int starts = 3;
  int max_iterations = 300;
  /// Stop when the simplex size (radians) falls below this.
  double simplex_tol = 1e-10;
  /// Extra candidate directions scanned with the grid.
  std::vector<Eigen::Vector3d> extra;
};

namespace detail {

struct SphereObjective {
  const std::function<double(const Eigen::Vector3d&)>* fn;
  Eigen::Vector3d c, a, b;
  double sign;
  std::size_t* count;

  static std::pair<Eigen::Vector3d, Eigen::Vector3d> frame(const Eigen::Vector3d& c) {
    const Eigen::Vector3d seed = std::abs(c[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d a = (seed - seed.dot(c) * c).normalized();
    return {a, c.cross(a)};
  }

  Eigen::Vector3d point(double s, double t) const { return (c + s * a + t * b).normalized(); }

  static double call(const gsl_vector* x, void* self) {
    auto* o = static_cast<SphereObjective*>(self);
    ++*o->count;
    return o->sign * (*o->fn)(o->point(gsl_vector_get(x, 0), gsl_vector_get(x, 1)));
  }
};

}  // namespace detail

/// Max (or min) of fn over S^2: Fibonacci grid scan, then Nelder-Mead in the tangent chart of
/// the best `starts` grid points. The result is never worse than the grid value.
inline SphereExtremum extremize_on_sphere(const std::function<double(const Eigen::Vector3d&)>& fn, bool maximize,
                                          const ExtremumOptions& opt = {}) {
  const double sign = maximize ? -1.0 : 1.0;  // minimize sign * fn
  auto pts = fibonacci_sphere(opt.grid);
  pts.insert(pts.end(), opt.extra.begin(), opt.extra.end());
  std::vector<double> val(pts.size());
  SphereExtremum out;
  for (std::size_t i = 0; i < pts.size(); ++i) val[i] = sign * fn(pts[i]);
  out.evaluations = pts.size();
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const int starts = std::min<int>(opt.starts, static_cast<int>(pts.size()));
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](std::size_t i, std::size_t j) { return val[i] < val[j] || (val[i] == val[j] && i < j); });
  double best = val[order[0]];
  out.direction = pts[order[0]];
  out.grid_value = sign * best;
  const double step = 0.5 * grid_spacing(opt.grid);

  gsl_set_error_handler_off();
  gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* ss = gsl_vector_alloc(2);
  for (int s = 0; s < starts; ++s) {
    const Eigen::Vector3d c = pts[order[s]];
    const auto [a, b] = detail::SphereObjective::frame(c);
    detail::SphereObjective obj{&fn, c, a, b, sign, &out.evaluations};
    gsl_multimin_function f{&detail::SphereObjective::call, 2, &obj};
    gsl_vector_set_zero(x);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer_set(nm, &f, x, ss);
    for (int it = 0; it < opt.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm), opt.simplex_tol) == GSL_SUCCESS) break;
    }
    const gsl_vector* xm = gsl_multimin_fminimizer_x(nm);
    const double v = gsl_multimin_fminimizer_minimum(nm);
    if (v < best) {
      best = v;
      out.direction = obj.point(gsl_vector_get(xm, 0), gsl_vector_get(xm, 1));
    }
  }
  gsl_vector_free(ss);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(nm);
  out.value = sign * best;
  return out;
}

}  // namespace projkit
