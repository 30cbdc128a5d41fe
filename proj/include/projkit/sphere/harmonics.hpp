#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "projkit/error.hpp"
#include "projkit/sphere/quadrature.hpp"

namespace projkit {

// Real orthonormal spherical harmonics on S^2, even degrees only.
//
// Y_{m,k}(x) = N_{m,a} * P_m^{(a)}(z) * A_k(x, y),   a = |k|,
// with P_m^{(a)} the a-th derivative of the Legendre polynomial and A_k = Re (x+iy)^a for
// k >= 0, Im (x+iy)^a for k < 0. On the sphere this is the usual associated-Legendre form
// (without the Condon-Shortley phase); off the sphere it is a polynomial G in (x, y, z),
// which gives closed-form Cartesian derivatives.
//
// The derivatives d^a P_m / dz^a are evaluated as (2a-1)!! C^{(a+1/2)}_{m-a}(z) through the
// Gegenbauer recurrence.

/// Number of even-degree basis functions up to degree L.
inline int harmonic_count(int max_degree) { return (max_degree / 2 + 1) * (max_degree + 1); }

/// Flat index of (m, k), m even, -m <= k <= m.
inline int harmonic_index(int m, int k) { return m * (m - 1) / 2 + m + k; }

/// Value, gradient and Hessian of the polynomial extension G of a sphere function.
struct HarmonicJet {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
};

class RealHarmonics {
 public:
  explicit RealHarmonics(int max_degree) : max_degree_(max_degree) {
    if (max_degree < 0 || max_degree % 2 != 0)
      throw Error(Errc::precondition, "harmonic degree must be even and non-negative");
    const int top = max_degree_ + 2;
    scale_.assign(static_cast<std::size_t>((max_degree_ + 1) * (top + 1)), 0.0);
    for (int m = 0; m <= max_degree_; ++m) {
      for (int a = 0; a <= m; ++a) {
        double log_scale = 0.5 * (std::log((2.0 * m + 1.0) / (4.0 * std::numbers::pi)) +
                                  std::lgamma(m - a + 1.0) - std::lgamma(m + a + 1.0));
        if (a > 0) log_scale += 0.5 * std::log(2.0) + log_double_factorial(2 * a - 1);
        scale_[static_cast<std::size_t>(m * (top + 1) + a)] = std::exp(log_scale);
      }
    }
  }

  int max_degree() const { return max_degree_; }
  int size() const { return harmonic_count(max_degree_); }

  /// Basis values at a point of S^2.
  void values(const Eigen::Vector3d& x, std::span<double> out) const {
    if (static_cast<int>(out.size()) != size()) throw Error(Errc::dimension_mismatch, "basis buffer size");
    Workspace ws;
    prepare(x, 0, ws);
    for (int m = 0; m <= max_degree_; m += 2) {
      for (int a = 0; a <= m; ++a) {
        const double radial = scale(m, a) * ws.gegen(a, m - a);
        out[harmonic_index(m, a)] = radial * ws.power[a].real();
        if (a > 0) out[harmonic_index(m, -a)] = radial * ws.power[a].imag();
      }
    }
  }

  double evaluate(const Eigen::Vector3d& x, std::span<const double> coeffs) const {
    check(coeffs);
    Workspace ws;
    prepare(x, 0, ws);
    double sum = 0.0;
    for (int m = 0; m <= max_degree_; m += 2) {
      for (int a = 0; a <= m; ++a) {
        const double radial = scale(m, a) * ws.gegen(a, m - a);
        sum += radial * ws.power[a].real() * coeffs[harmonic_index(m, a)];
        if (a > 0) sum += radial * ws.power[a].imag() * coeffs[harmonic_index(m, -a)];
      }
    }
    return sum;
  }

  /// Jet of G = sum_i c_i G_i at x (x on S^2).
  HarmonicJet jet(const Eigen::Vector3d& x, std::span<const double> coeffs) const {
    check(coeffs);
    Workspace ws;
    prepare(x, 2, ws);
    HarmonicJet out;
    const std::complex<double> I(0.0, 1.0);
    for (int m = 0; m <= max_degree_; m += 2) {
      for (int a = 0; a <= m; ++a) {
        const double s = scale(m, a);
        const double q0 = s * ws.gegen(a, m - a);
        const double q1 = m - a >= 1 ? s * (2.0 * a + 1.0) * ws.gegen(a + 1, m - a - 1) : 0.0;
        const double q2 = m - a >= 2 ? s * (2.0 * a + 1.0) * (2.0 * a + 3.0) * ws.gegen(a + 2, m - a - 2) : 0.0;
        const std::complex<double> w0 = ws.power[a];
        const std::complex<double> w1 = a >= 1 ? static_cast<double>(a) * ws.power[a - 1] : 0.0;
        const std::complex<double> w2 = a >= 2 ? static_cast<double>(a * (a - 1)) * ws.power[a - 2] : 0.0;
        // derivatives of (x + iy)^a: d/dx -> w1, d/dy -> i w1, d2/dx2 -> w2, d2/dxdy -> i w2, d2/dy2 -> -w2
        const std::complex<double> ax = w1, ay = I * w1, axx = w2, axy = I * w2, ayy = -w2;
        for (int part = 0; part < (a > 0 ? 2 : 1); ++part) {
          const double c = coeffs[harmonic_index(m, part == 0 ? a : -a)];
          if (c == 0.0) continue;
          auto pick = [part](std::complex<double> v) { return part == 0 ? v.real() : v.imag(); };
          const double A = pick(w0), Ax = pick(ax), Ay = pick(ay);
          out.value += c * q0 * A;
          out.gradient += c * Eigen::Vector3d(q0 * Ax, q0 * Ay, q1 * A);
          Eigen::Matrix3d h;
          h(0, 0) = q0 * pick(axx);
          h(0, 1) = h(1, 0) = q0 * pick(axy);
          h(1, 1) = q0 * pick(ayy);
          h(0, 2) = h(2, 0) = q1 * Ax;
          h(1, 2) = h(2, 1) = q1 * Ay;
          h(2, 2) = q2 * A;
          out.hessian += c * h;
        }
      }
    }
    return out;
  }

 private:
  struct Workspace {
    int stride = 0;
    std::vector<double> table;  // C^{(a+1/2)}_n(z), row a, column n
    std::vector<std::complex<double>> power;
    double gegen(int a, int n) const { return table[static_cast<std::size_t>(a * stride + n)]; }
  };

  static double log_double_factorial(int k) {
    double s = 0.0;
    for (int j = k; j > 1; j -= 2) s += std::log(static_cast<double>(j));
    return s;
  }

  double scale(int m, int a) const {
    return scale_[static_cast<std::size_t>(m * (max_degree_ + 3) + a)];
  }

  void check(std::span<const double> coeffs) const {
    if (static_cast<int>(coeffs.size()) != size())
      throw Error(Errc::dimension_mismatch, "coefficient count does not match the basis");
  }

  void prepare(const Eigen::Vector3d& x, int extra, Workspace& ws) const {
    const int L = max_degree_;
    const int rows = L + 1 + extra;
    ws.stride = L + 1;
    ws.table.assign(static_cast<std::size_t>(rows * ws.stride), 0.0);
    const double z = x[2];
    for (int a = 0; a < rows; ++a) {
      const double lambda = a + 0.5;
      const int nmax = L - a;
      if (nmax < 0) continue;
      double* row = &ws.table[static_cast<std::size_t>(a * ws.stride)];
      row[0] = 1.0;
      if (nmax >= 1) row[1] = 2.0 * lambda * z;
      for (int n = 2; n <= nmax; ++n)
        row[n] = (2.0 * z * (n + lambda - 1.0) * row[n - 1] - (n + 2.0 * lambda - 2.0) * row[n - 2]) / n;
    }
    ws.power.assign(static_cast<std::size_t>(L + 1), 1.0);
    const std::complex<double> w(x[0], x[1]);
    for (int a = 1; a <= L; ++a) ws.power[a] = ws.power[a - 1] * w;
  }

  int max_degree_;
  std::vector<double> scale_;
};

/// Coefficients of an even function on S^2 in the real orthonormal basis, degrees <= L.
/// Odd degrees are not stored and are identically zero.
struct HarmonicExpansion {
  int max_degree = 0;
  std::vector<double> coeffs;

  HarmonicExpansion() : coeffs(1, 0.0) {}
  HarmonicExpansion(int L, std::vector<double> c) : max_degree(L), coeffs(std::move(c)) {
    if (L < 0 || L % 2 != 0) throw Error(Errc::precondition, "expansion degree must be even");
    if (static_cast<int>(coeffs.size()) != harmonic_count(L))
      throw Error(Errc::dimension_mismatch, "coefficient count does not match the degree");
  }

  static HarmonicExpansion zero(int L) { return {L, std::vector<double>(harmonic_count(L), 0.0)}; }

  /// Expansion of the constant function c.
  static HarmonicExpansion constant(int L, double c) {
    auto e = zero(L);
    e.coeffs[0] = c * std::sqrt(4.0 * std::numbers::pi);
    return e;
  }

  double coeff(int m, int k) const {
    if (m % 2 != 0 || m > max_degree) return 0.0;
    return coeffs[harmonic_index(m, k)];
  }

  /// Mean value over the sphere times 4 pi.
  double integral() const { return coeffs[0] * std::sqrt(4.0 * std::numbers::pi); }

  /// Copy truncated or zero-padded to degree L.
  HarmonicExpansion resized(int L) const {
    auto out = zero(L);
    const int n = std::min(harmonic_count(L), harmonic_count(max_degree));
    std::copy_n(coeffs.begin(), n, out.coeffs.begin());
    return out;
  }

  HarmonicExpansion& operator+=(const HarmonicExpansion& other) {
    if (other.max_degree > max_degree) *this = resized(other.max_degree);
    for (std::size_t i = 0; i < other.coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
    return *this;
  }
  HarmonicExpansion& operator*=(double s) {
    for (double& c : coeffs) c *= s;
    return *this;
  }
  friend HarmonicExpansion operator+(HarmonicExpansion a, const HarmonicExpansion& b) { return a += b; }
  friend HarmonicExpansion operator*(double s, HarmonicExpansion a) { return a *= s; }
  friend HarmonicExpansion operator-(HarmonicExpansion a, const HarmonicExpansion& b) {
    return a += (-1.0) * b;
  }

  /// Applies a per-degree multiplier table (index = degree).
  template <class F>
  HarmonicExpansion scaled_by_degree(F&& multiplier) const {
    HarmonicExpansion out = *this;
    for (int m = 0; m <= max_degree; m += 2) {
      const double s = multiplier(m);
      for (int k = -m; k <= m; ++k) out.coeffs[harmonic_index(m, k)] *= s;
    }
    return out;
  }

  /// L2 energy per even degree.
  std::vector<double> degree_energy() const {
    std::vector<double> e(static_cast<std::size_t>(max_degree + 1), 0.0);
    for (int m = 0; m <= max_degree; m += 2)
      for (int k = -m; k <= m; ++k) e[m] += coeffs[harmonic_index(m, k)] * coeffs[harmonic_index(m, k)];
    return e;
  }
};

/// Shared basis object for degree L.
inline const RealHarmonics& harmonics(int max_degree) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<RealHarmonics>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[max_degree];
  if (!slot) slot = std::make_unique<RealHarmonics>(max_degree);
  return *slot;
}

inline double evaluate(const HarmonicExpansion& e, const Eigen::Vector3d& theta) {
  return harmonics(e.max_degree).evaluate(theta, e.coeffs);
}

inline double evaluate(const HarmonicExpansion& e, const Direction& theta) {
  if (theta.dimension() != 3) throw Error(Errc::dimension_mismatch, "harmonic expansions live on S^2");
  return evaluate(e, Eigen::Vector3d(theta.coords().head<3>()));
}

inline HarmonicJet jet(const HarmonicExpansion& e, const Eigen::Vector3d& theta) {
  return harmonics(e.max_degree).jet(theta, e.coeffs);
}

/// Odd-part energy above this fraction of the total is rejected by expand().
inline constexpr double kOddEnergyTolerance = 1e-8;

/// Projects samples at the nodes of `quad` onto the even harmonics of degree <= L.
/// Rejects inputs whose odd part carries more than kOddEnergyTolerance of the energy.
inline HarmonicExpansion expand(const SphericalQuadrature& quad, std::span<const double> samples, int L) {
  if (quad.dimension != 3) throw Error(Errc::unsupported, "harmonic analysis is implemented for n = 3");
  if (quad.exact_degree < 2 * L) throw Error(Errc::precondition, "quadrature degree must be >= 2L");
  if (samples.size() != quad.size()) throw Error(Errc::dimension_mismatch, "sample count");
  double total = 0.0, odd = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = 0.5 * (samples[i] - samples[quad.antipode[i]]);
    odd += quad.weights[i] * d * d;
    total += quad.weights[i] * samples[i] * samples[i];
  }
  if (odd > kOddEnergyTolerance * total)
    throw Error(Errc::symmetry_violation,
                "odd part holds " + std::to_string(odd / total) + " of the energy; even input required");
  const RealHarmonics& basis = harmonics(L);
  HarmonicExpansion out = HarmonicExpansion::zero(L);
  std::vector<double> y(basis.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double even = 0.5 * (samples[i] + samples[quad.antipode[i]]);
    basis.values(quad.node3(i), y);
    const double w = quad.weights[i] * even;
    for (std::size_t j = 0; j < y.size(); ++j) out.coeffs[j] += w * y[j];
  }
  return out;
}

/// Expands a callable f(Vector3d) using a rule of degree max(2L, quad_degree).
template <class F>
HarmonicExpansion expand_function(F&& f, int L, int quad_degree = 0) {
  const auto& quad = cached_quadrature(3, std::max(2 * L + 2, quad_degree));
  std::vector<double> samples(quad.size());
  for (std::size_t i = 0; i < quad.size(); ++i) samples[i] = f(Eigen::Vector3d(quad.node3(i)));
  return expand(quad, samples, L);
}

/// Samples of an expansion at every node of a rule.
inline std::vector<double> sample(const HarmonicExpansion& e, const SphericalQuadrature& quad) {
  std::vector<double> out(quad.size());
  const RealHarmonics& basis = harmonics(e.max_degree);
  for (std::size_t i = 0; i < quad.size(); ++i) out[i] = basis.evaluate(quad.node3(i), e.coeffs);
  return out;
}

}  // namespace projkit
