#pragma once

// Shared fixtures for the unit tests.

#include <cmath>
#include <random>
#include <vector>

#include "projkit/bodies.hpp"

namespace fixtures {

using projkit::Vector;

inline Vector v3(double x, double y, double z) {
  Vector v(3);
  v << x, y, z;
  return v;
}

inline projkit::Polytope cube(double r = 1.0) {
  std::vector<Vector> pts;
  for (int m = 0; m < 8; ++m) pts.push_back(r * v3(m & 1 ? 1 : -1, m & 2 ? 1 : -1, m & 4 ? 1 : -1));
  return projkit::Polytope::from_vertices(pts);
}

inline projkit::Polytope cross_polytope() {
  std::vector<Vector> pts;
  for (int i = 0; i < 3; ++i) {
    pts.push_back(Vector::Unit(3, i));
    pts.push_back(-Vector::Unit(3, i));
  }
  return projkit::Polytope::from_vertices(pts);
}

inline Vector gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline projkit::Direction random_direction(int n, std::mt19937_64& rng) {
  return projkit::Direction::from(gaussian(n, rng));
}

/// Symmetric hull of random points (and their negatives).
inline projkit::Polytope random_polytope(int count, std::mt19937_64& rng) {
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i) {
    Vector v = gaussian(3, rng);
    pts.push_back(v);
    pts.push_back(-v);
  }
  return projkit::Polytope::from_vertices(pts);
}

inline projkit::Zonotope random_zonotope(int count, std::mt19937_64& rng) {
  std::vector<Vector> gens;
  for (int i = 0; i < count; ++i) gens.push_back(gaussian(3, rng));
  return projkit::Zonotope::from_generators(gens);
}

/// Coordinate generators e_1, e_2, e_3 plus `extra` random ones.
inline projkit::Zonotope box_plus_random(int extra, std::mt19937_64& rng, double scale = 0.5) {
  std::vector<Vector> gens{v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)};
  for (int i = 0; i < extra; ++i) gens.push_back(scale * gaussian(3, rng));
  return projkit::Zonotope::from_generators(gens);
}

}  // namespace fixtures
