#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "projkit/error.hpp"
#include "projkit/sphere/harmonics.hpp"
#include "projkit/sphere/quadrature.hpp"

namespace projkit {

/// Degree of homogeneity of the extension f(x/|x|) |x|^p. Only p = 1 (support functions)
/// and p = -n-1 (curvature functions) are used.
class HomogeneousDegree {
 public:
  static HomogeneousDegree support() { return HomogeneousDegree(1.0); }
  static HomogeneousDegree curvature(int n) { return HomogeneousDegree(-n - 1.0); }

  static HomogeneousDegree of(double p, int n) {
    if (p != 1.0 && p != -n - 1.0) throw Error(Errc::unsupported, "homogeneity must be 1 or -n-1");
    return HomogeneousDegree(p);
  }

  double value() const { return p_; }

 private:
  explicit HomogeneousDegree(double p) : p_(p) {}
  double p_;
};

/// Multiplier mu(n, p, m): for an even harmonic Y of degree m,
///   (Y(x/|x|) |x|^p)^ = mu * Y(xi/|xi|) |xi|^{-n-p},
/// with the transform normalized so that applying it twice to an even function gives (2 pi)^n.
///   mu = (-1)^{m/2} 2^{n+p} pi^{n/2} Gamma((m+n+p)/2) / Gamma((m-p)/2)
/// Gamma arguments at non-positive integers do not arise for p in {1, -n-1} and even m when
/// n is odd; for even n the ratio is taken in the limit via lgamma/sign bookkeeping.
inline double homogeneous_multiplier(int n, double p, int m) {
  if (m % 2 != 0) throw Error(Errc::precondition, "multiplier defined for even degrees");
  const double a = 0.5 * (m + n + p);
  const double b = 0.5 * (m - p);
  auto signed_lgamma = [](double x, int& sign) {
    const double g = std::lgamma(x);
    sign = std::tgamma(x) < 0.0 ? -1 : 1;
    return g;
  };
  int sa = 1, sb = 1;
  const double la = signed_lgamma(a, sa);
  const double lb = signed_lgamma(b, sb);
  const double parity = (m / 2) % 2 == 0 ? 1.0 : -1.0;
  return parity * sa * sb * std::exp((n + p) * std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) + la - lb);
}

/// Expansion of g where (f r^p)^ = g r^{-3-p}, for even f on S^2.
inline HarmonicExpansion homogeneous_fourier(const HarmonicExpansion& f, HomogeneousDegree p) {
  return f.scaled_by_degree([&](int m) { return homogeneous_multiplier(3, p.value(), m); });
}

/// Funk-Hecke multiplier of the cosine transform  f -> integral |<xi, u>| f(u) du  on S^2.
/// Equals -2 mu(3, -4, m) / pi, so that P_K = (1/2) cosine transform of f_K = -(1/pi)(f r^-4)^.
inline double cosine_transform_multiplier(int m) { return -2.0 * homogeneous_multiplier(3, -4.0, m) / std::numbers::pi; }

/// Both sides of  int g1 g2 = (2 pi)^3 int f1 f2  and their relative gap.
struct ParsevalRecord {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
};

/// g1, g2 are the transforms of f1 (p = 1) and f2 (p = -4); `f1_f2_integral` is int f1 f2 over S^2.
/// The left side uses orthonormality of the basis.
inline ParsevalRecord spherical_parseval(const HarmonicExpansion& g1, const HarmonicExpansion& g2,
                                         double f1_f2_integral) {
  ParsevalRecord r;
  const std::size_t n = std::min(g1.coeffs.size(), g2.coeffs.size());
  for (std::size_t i = 0; i < n; ++i) r.lhs += g1.coeffs[i] * g2.coeffs[i];
  r.rhs = std::pow(2.0 * std::numbers::pi, 3) * f1_f2_integral;
  r.relative_gap = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
  return r;
}

/// Same identity with the left side integrated on a quadrature rule instead of by
/// orthonormality; used as an independent cross-check.
inline ParsevalRecord spherical_parseval_quadrature(const HarmonicExpansion& g1, const HarmonicExpansion& g2,
                                                    double f1_f2_integral, const SphericalQuadrature& quad) {
  ParsevalRecord r;
  const auto s1 = sample(g1, quad);
  const auto s2 = sample(g2, quad);
  for (std::size_t i = 0; i < quad.size(); ++i) r.lhs += quad.weights[i] * s1[i] * s2[i];
  r.rhs = std::pow(2.0 * std::numbers::pi, 3) * f1_f2_integral;
  r.relative_gap = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
  return r;
}

/// Per-degree multipliers (index = degree, entries 0..L) of convolution with the positive
/// zonal kernel k(t) = (sum_{j<=L/2} (2j+1) P_j(t))^2, normalized so the degree-0 entry is 1.
/// The kernel is a square, so convolution maps support functions to support functions and
/// zonoids to zonoids; its degree is L, so the result is band-limited.
inline std::vector<double> fejer_multipliers(int L) {
  if (L < 0 || L % 2 != 0) throw Error(Errc::precondition, "damping degree must be even");
  const int half = L / 2;
  std::vector<double> t, w;
  detail::gauss_legendre(L + 2, t, w);
  std::vector<double> lambda(static_cast<std::size_t>(L + 1), 0.0);
  for (std::size_t q = 0; q < t.size(); ++q) {
    double kernel = 0.0;
    double p0 = 1.0, p1 = t[q];
    std::vector<double> legendre(static_cast<std::size_t>(L + 1));
    legendre[0] = 1.0;
    if (L >= 1) legendre[1] = t[q];
    for (int j = 2; j <= L; ++j) {
      const double p2 = ((2.0 * j - 1.0) * t[q] * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
      legendre[j] = p2;
    }
    for (int j = 0; j <= half; ++j) kernel += (2.0 * j + 1.0) * legendre[j];
    kernel *= kernel;
    for (int m = 0; m <= L; ++m) lambda[m] += w[q] * kernel * legendre[m];
  }
  const double base = lambda[0];
  for (double& v : lambda) v /= base;
  return lambda;
}

inline HarmonicExpansion fejer_damped(const HarmonicExpansion& e) {
  const auto mult = fejer_multipliers(e.max_degree);
  return e.scaled_by_degree([&](int m) { return mult[m]; });
}

}  // namespace projkit
