#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "projkit/error.hpp"

namespace projkit::geometry {

// ---------------------------------------------------------------------------------------------
// Plane (n = 2)

/// Andrew's monotone chain; returns hull vertices counter-clockwise, collinear points dropped.
inline std::vector<Eigen::Vector2d> convex_hull2(std::vector<Eigen::Vector2d> pts, double eps = 0.0) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= eps) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

inline double polygon_area(const std::vector<Eigen::Vector2d>& ccw) {
  double a = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const auto& p = ccw[i];
    const auto& q = ccw[(i + 1) % ccw.size()];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * a;
}

inline double polygon_perimeter(const std::vector<Eigen::Vector2d>& ccw) {
  double s = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i) s += (ccw[(i + 1) % ccw.size()] - ccw[i]).norm();
  return s;
}

/// Orthonormal basis (as columns) of the orthogonal complement of a unit vector.
inline Eigen::MatrixXd complement_basis(const Eigen::VectorXd& xi) {
  const int n = static_cast<int>(xi.size());
  Eigen::MatrixXd m(n, n);
  m.col(0) = xi;
  int pivot = 0;
  xi.cwiseAbs().maxCoeff(&pivot);
  for (int i = 0, col = 1; i < n; ++i)
    if (i != pivot) m.col(col++) = Eigen::VectorXd::Unit(n, i);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

// ---------------------------------------------------------------------------------------------
// Space (n = 3): incremental hull with coplanar triangles merged into facets

struct Facet3 {
  Eigen::Vector3d normal;
  double offset = 0.0;
  double area = 0.0;
  std::vector<int> triangles;
};

struct Edge3 {
  int a = 0, b = 0;          // point indices
  int facet_left = 0, facet_right = 0;
  double length = 0.0;
  double exterior_angle = 0.0;  // angle between the two facet normals
};

struct Hull3 {
  std::vector<Eigen::Vector3d> points;
  std::vector<std::array<int, 3>> triangles;  // outward counter-clockwise
  std::vector<Eigen::Vector3d> triangle_normals;
  std::vector<int> triangle_facet;
  std::vector<Facet3> facets;
  std::vector<Edge3> edges;
  std::vector<int> vertex_ids;  // points that are hull vertices
  double volume = 0.0;
  double area = 0.0;
};

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d n;
  double d;
  bool alive;
};

}  // namespace detail

/// Triangulated hull of a full-dimensional point set. `rel_eps` scales the visibility threshold.
inline Hull3 convex_hull3(const std::vector<Eigen::Vector3d>& pts, double rel_eps = 1e-11) {
  using detail::Face;
  const int npts = static_cast<int>(pts.size());
  if (npts < 4) throw Error(Errc::degenerate_body, "hull needs at least 4 points");
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  if (!(scale > 0.0)) throw Error(Errc::degenerate_body, "all points at the origin");
  const double eps = rel_eps * scale;

  // initial simplex from extreme points
  int i0 = 0;
  for (int i = 1; i < npts; ++i)
    if (pts[i].x() < pts[i0].x()) i0 = i;
  int i1 = i0;
  double best = 0.0;
  for (int i = 0; i < npts; ++i)
    if (double d = (pts[i] - pts[i0]).norm(); d > best) best = d, i1 = i;
  const Eigen::Vector3d dir = (pts[i1] - pts[i0]).normalized();
  int i2 = i0;
  best = 0.0;
  for (int i = 0; i < npts; ++i) {
    const Eigen::Vector3d w = pts[i] - pts[i0];
    if (double d = (w - w.dot(dir) * dir).norm(); d > best) best = d, i2 = i;
  }
  const Eigen::Vector3d pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = i0;
  best = 0.0;
  for (int i = 0; i < npts; ++i)
    if (double d = std::abs(pn.dot(pts[i] - pts[i0])); d > best) best = d, i3 = i;
  if (best <= 1e3 * eps || i1 == i0 || i2 == i0) throw Error(Errc::degenerate_body, "points are not full-dimensional");

  const Eigen::Vector3d inside = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edge_face;
  auto add_face = [&](int a, int b, int c) {
    Eigen::Vector3d n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    if (n.dot(pts[a] - inside) < 0.0) {
      std::swap(b, c);
      n = -n;
    }
    n.normalize();
    const int id = static_cast<int>(faces.size());
    faces.push_back({{a, b, c}, n, n.dot(pts[a]), true});
    edge_face[detail::edge_key(a, b)] = id;
    edge_face[detail::edge_key(b, c)] = id;
    edge_face[detail::edge_key(c, a)] = id;
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  std::vector<int> visible;
  std::vector<std::pair<int, int>> horizon;
  for (int p = 0; p < npts; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    // visible region grown from the farthest face so that it stays connected under the tolerance
    int seed = -1;
    double far = eps;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive)
        if (const double d = faces[f].n.dot(pts[p]) - faces[f].d; d > far) far = d, seed = f;
    if (seed < 0) continue;
    auto across = [&](int f, int e) {
      const auto& v = faces[f].v;
      return edge_face.at(detail::edge_key(v[(e + 1) % 3], v[e]));
    };
    visible.assign(1, seed);
    faces[seed].alive = false;
    for (std::size_t k = 0; k < visible.size(); ++k)
      for (int e = 0; e < 3; ++e) {
        const int g = across(visible[k], e);
        if (faces[g].alive && faces[g].n.dot(pts[p]) - faces[g].d > eps) {
          faces[g].alive = false;
          visible.push_back(g);
        }
      }
    // fill faces enclosed by the region so the horizon is a single loop
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t k = 0; k < visible.size(); ++k)
        for (int e = 0; e < 3; ++e) {
          const int g = across(visible[k], e);
          if (!faces[g].alive) continue;
          int hidden = 0;
          for (int j = 0; j < 3; ++j) hidden += faces[across(g, j)].alive ? 0 : 1;
          if (hidden >= 2 && faces[g].n.dot(pts[p]) - faces[g].d > -eps) {
            faces[g].alive = false;
            visible.push_back(g);
            grew = true;
          }
        }
    }
    horizon.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e], b = v[(e + 1) % 3];
        const auto it = edge_face.find(detail::edge_key(b, a));
        if (it != edge_face.end() && faces[it->second].alive) horizon.emplace_back(a, b);
      }
    }
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edge_face.erase(detail::edge_key(v[e], v[(e + 1) % 3]));
    }
    for (const auto& [a, b] : horizon) {
      const int id = static_cast<int>(faces.size());
      Eigen::Vector3d n = (pts[b] - pts[a]).cross(pts[p] - pts[a]);
      const double len = n.norm();
      n = len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
      faces.push_back({{a, b, p}, n, n.dot(pts[a]), true});
      edge_face[detail::edge_key(a, b)] = id;
      edge_face[detail::edge_key(b, p)] = id;
      edge_face[detail::edge_key(p, a)] = id;
    }
  }

  Hull3 h;
  h.points = pts;
  std::vector<int> tri_of_face(faces.size(), -1);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive) continue;
    tri_of_face[f] = static_cast<int>(h.triangles.size());
    h.triangles.push_back(faces[f].v);
    const auto& v = faces[f].v;
    Eigen::Vector3d n = (pts[v[1]] - pts[v[0]]).cross(pts[v[2]] - pts[v[0]]);
    h.triangle_normals.push_back(n.norm() > 0.0 ? Eigen::Vector3d(n.normalized()) : faces[f].n);
  }
  const int nt = static_cast<int>(h.triangles.size());
  auto neighbour = [&](int t, int e) {
    const auto& v = h.triangles[t];
    return tri_of_face[edge_face.at(detail::edge_key(v[(e + 1) % 3], v[e]))];
  };

  // merge coplanar neighbours
  std::vector<int> parent(nt);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto tri_area = [&](int t) {
    const auto& v = h.triangles[t];
    return 0.5 * (pts[v[1]] - pts[v[0]]).cross(pts[v[2]] - pts[v[0]]).norm();
  };
  auto coplanar = [&](int s, int t) {
    // opposite vertex of t lies in the plane of s
    const auto& vs = h.triangles[s];
    for (int k = 0; k < 3; ++k) {
      const double dist = h.triangle_normals[s].dot(pts[h.triangles[t][k]] - pts[vs[0]]);
      if (std::abs(dist) > 1e2 * eps) return false;
    }
    return h.triangle_normals[s].dot(h.triangle_normals[t]) > 0.0;
  };
  for (int t = 0; t < nt; ++t)
    for (int e = 0; e < 3; ++e) {
      const int s = neighbour(t, e);
      if (s > t && coplanar(t, s)) parent[find(s)] = find(t);
    }
  std::vector<int> facet_id(nt, -1);
  h.triangle_facet.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const int r = find(t);
    if (facet_id[r] < 0) {
      facet_id[r] = static_cast<int>(h.facets.size());
      h.facets.emplace_back();
      h.facets.back().normal.setZero();
    }
    Facet3& f = h.facets[facet_id[r]];
    const double a = tri_area(t);
    f.triangles.push_back(t);
    f.area += a;
    f.normal += a * h.triangle_normals[t];
    h.triangle_facet[t] = facet_id[r];
  }
  for (auto& f : h.facets) {
    f.normal.normalize();
    double off = 0.0;
    int cnt = 0;
    for (int t : f.triangles)
      for (int k = 0; k < 3; ++k) off += f.normal.dot(pts[h.triangles[t][k]]), ++cnt;
    f.offset = off / cnt;
    h.area += f.area;
  }
  for (int t = 0; t < nt; ++t) {
    const auto& v = h.triangles[t];
    h.volume += pts[v[0]].dot(pts[v[1]].cross(pts[v[2]])) / 6.0;
    for (int e = 0; e < 3; ++e) {
      const int s = neighbour(t, e);
      const int fa = h.triangle_facet[t], fb = h.triangle_facet[s];
      if (fa == fb || v[e] > v[(e + 1) % 3]) continue;
      Edge3 edge;
      edge.a = v[e];
      edge.b = v[(e + 1) % 3];
      edge.facet_left = fa;
      edge.facet_right = fb;
      edge.length = (pts[edge.b] - pts[edge.a]).norm();
      edge.exterior_angle = std::acos(std::clamp(h.facets[fa].normal.dot(h.facets[fb].normal), -1.0, 1.0));
      h.edges.push_back(edge);
    }
  }
  std::vector<char> used(pts.size(), 0);
  for (const auto& t : h.triangles)
    for (int k : t) used[k] = 1;
  for (int i = 0; i < npts; ++i)
    if (used[i]) h.vertex_ids.push_back(i);
  return h;
}

/// Adjacent triangle across edge e (v[e] -> v[e+1]) of triangle t; built once per hull.
inline std::vector<std::array<int, 3>> triangle_adjacency(const Hull3& h) {
  std::unordered_map<std::uint64_t, int> owner;
  for (int t = 0; t < static_cast<int>(h.triangles.size()); ++t)
    for (int e = 0; e < 3; ++e) owner[detail::edge_key(h.triangles[t][e], h.triangles[t][(e + 1) % 3])] = t;
  std::vector<std::array<int, 3>> adj(h.triangles.size());
  for (int t = 0; t < static_cast<int>(h.triangles.size()); ++t)
    for (int e = 0; e < 3; ++e)
      adj[t][e] = owner.at(detail::edge_key(h.triangles[t][(e + 1) % 3], h.triangles[t][e]));
  return adj;
}

/// Second moment of the hull, assuming it contains the origin (cone decomposition).
inline Eigen::Matrix3d second_moment(const Hull3& h) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (const auto& t : h.triangles) {
    const auto& a = h.points[t[0]];
    const auto& b = h.points[t[1]];
    const auto& c = h.points[t[2]];
    const double vol = a.dot(b.cross(c)) / 6.0;
    const Eigen::Vector3d s = a + b + c;
    m += vol / 20.0 * (a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose());
  }
  return m;
}

// ---------------------------------------------------------------------------------------------
// General dimension: brute-force facet enumeration (small vertex counts only)

struct FacetN {
  Eigen::VectorXd normal;
  double offset = 0.0;
  std::vector<int> vertex_ids;
};

inline constexpr int kMaxBruteForceVertices = 80;

namespace detail {

inline bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline std::vector<FacetN> facets_nd(const std::vector<Eigen::VectorXd>& pts) {
  const int np = static_cast<int>(pts.size());
  if (np == 0) throw Error(Errc::degenerate_body, "empty point set");
  const int n = static_cast<int>(pts[0].size());
  if (np > kMaxBruteForceVertices) throw Error(Errc::unsupported, "too many vertices for facet enumeration");
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-10 * std::max(scale, 1e-300);
  std::vector<FacetN> out;
  if (np < n) return out;
  std::vector<int> c(n);
  std::iota(c.begin(), c.end(), 0);
  do {
    Eigen::MatrixXd d(n - 1, n);
    for (int i = 1; i < n; ++i) d.row(i - 1) = (pts[c[i]] - pts[c[0]]).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
    lu.setThreshold(1e-10);
    if (lu.rank() != n - 1) continue;
    Eigen::VectorXd nrm = lu.kernel().col(0).normalized();
    double off = nrm.dot(pts[c[0]]);
    int above = 0, below = 0;
    for (const auto& p : pts) {
      const double s = nrm.dot(p) - off;
      if (s > eps) ++above;
      if (s < -eps) ++below;
      if (above && below) break;
    }
    if (above && below) continue;
    if (above) nrm = -nrm, off = -off;
    bool dup = false;
    for (const auto& f : out)
      if ((f.normal - nrm).norm() < 1e-9 && std::abs(f.offset - off) < eps) dup = true;
    if (dup) continue;
    FacetN f{nrm, off, {}};
    for (int i = 0; i < np; ++i)
      if (std::abs(nrm.dot(pts[i]) - off) <= eps) f.vertex_ids.push_back(i);
    out.push_back(std::move(f));
  } while (detail::next_combination(c, np));
  return out;
}

/// Volume of the convex hull of points in R^n (n >= 1), by recursion over facets.
inline double hull_volume_nd(const std::vector<Eigen::VectorXd>& pts) {
  if (pts.empty()) return 0.0;
  const int n = static_cast<int>(pts[0].size());
  if (n == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
    return hi - lo;
  }
  if (n == 2) {
    std::vector<Eigen::Vector2d> q;
    q.reserve(pts.size());
    for (const auto& p : pts) q.emplace_back(p[0], p[1]);
    return polygon_area(convex_hull2(q));
  }
  if (n == 3) {
    std::vector<Eigen::Vector3d> q;
    q.reserve(pts.size());
    for (const auto& p : pts) q.emplace_back(p[0], p[1], p[2]);
    return convex_hull3(q).volume;
  }
  Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
  for (const auto& p : pts) center += p;
  center /= static_cast<double>(pts.size());
  double vol = 0.0;
  for (const auto& f : facets_nd(pts)) {
    const Eigen::MatrixXd basis = complement_basis(f.normal);
    std::vector<Eigen::VectorXd> sub;
    for (int id : f.vertex_ids) sub.push_back(basis.transpose() * pts[id]);
    vol += (f.offset - f.normal.dot(center)) * hull_volume_nd(sub) / n;
  }
  return vol;
}

}  // namespace projkit::geometry
