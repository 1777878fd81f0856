#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "vox3d/grid.hpp"

namespace vox3d {

namespace detail {

struct HullFace {
  int a, b, c;
  Point3 normal;  // outward, unnormalized
  double offset;  // inside iff dot(normal, p) <= offset
  bool alive = true;
};

inline HullFace make_face(const std::vector<Point3>& pts, int a, int b, int c) {
  const Point3 n = cross(pts[std::size_t(b)] - pts[std::size_t(a)], pts[std::size_t(c)] - pts[std::size_t(a)]);
  return {a, b, c, n, dot(n, pts[std::size_t(a)]), true};
}

/// Keeps only the lowest and highest point of every (x, y) column: nothing
/// strictly between them can be a hull vertex.
inline std::vector<Point3> column_extremes(std::span<const Point3> input) {
  std::map<std::pair<double, double>, std::pair<double, double>> cols;
  for (const Point3& p : input) {
    auto [it, fresh] = cols.try_emplace({p.x, p.y}, p.z, p.z);
    if (!fresh) {
      it->second.first = std::min(it->second.first, p.z);
      it->second.second = std::max(it->second.second, p.z);
    }
  }
  std::vector<Point3> out;
  out.reserve(cols.size() * 2);
  for (const auto& [xy, zz] : cols) {
    out.push_back({xy.first, xy.second, zz.first});
    if (zz.second != zz.first) out.push_back({xy.first, xy.second, zz.second});
  }
  return out;
}

inline bool near_integer(double v, double tol, long& out) {
  const double r = std::round(v);
  if (std::abs(v - r) > tol) return false;
  out = long(r);
  return true;
}

struct Box {
  Point3 lo, hi;
};

inline Box bounding_box(std::span<const Point3> pts) {
  Box b{pts[0], pts[0]};
  for (const Point3& p : pts)
    for (int k = 0; k < 3; ++k) {
      b.lo[k] = std::min(b.lo[k], p[k]);
      b.hi[k] = std::max(b.hi[k], p[k]);
    }
  return b;
}

constexpr double kSnap = 1e-9;

inline long lattice_lo(double v) { return long(std::ceil(v - kSnap)); }
inline long lattice_hi(double v) { return long(std::floor(v + kSnap)); }

/// Lattice points on the closed segment [a, b].
inline std::size_t count_segment(Point3 a, Point3 b, double tol) {
  const Point3 dir = b - a;
  const double len2 = dot(dir, dir);
  std::size_t n = 0;
  for (long x = lattice_lo(std::min(a.x, b.x)); x <= lattice_hi(std::max(a.x, b.x)); ++x)
    for (long y = lattice_lo(std::min(a.y, b.y)); y <= lattice_hi(std::max(a.y, b.y)); ++y)
      for (long z = lattice_lo(std::min(a.z, b.z)); z <= lattice_hi(std::max(a.z, b.z)); ++z) {
        const Point3 q = Point3{double(x), double(y), double(z)} - a;
        if (norm(cross(dir, q)) > tol * std::sqrt(len2)) continue;
        const double t = dot(dir, q);
        if (t >= -tol * std::sqrt(len2) && t <= len2 + tol * std::sqrt(len2)) ++n;
      }
  return n;
}

/// Lattice points in the convex polygon spanned by coplanar `pts`.
inline std::size_t count_planar(const std::vector<Point3>& pts, Point3 normal, double tol) {
  // Project by dropping the axis with the dominant normal component.
  int w = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(normal[k]) > std::abs(normal[w])) w = k;
  const int u = (w + 1) % 3, v = (w + 2) % 3;

  using P2 = std::pair<double, double>;
  std::vector<P2> q;
  q.reserve(pts.size());
  for (const Point3& p : pts) q.push_back({p[u], p[v]});
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  auto cross2 = [](P2 o, P2 a, P2 b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  // Andrew's monotone chain, counter-clockwise, collinear points dropped.
  std::vector<P2> hull(2 * q.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], q[i]) <= 0) --k;
    hull[k++] = q[i];
  }
  for (std::size_t i = q.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], q[i]) <= 0) --k;
    hull[k++] = q[i];
  }
  hull.resize(k - 1);

  const Box box = bounding_box(pts);
  const double offset = dot(normal, pts[0]);
  std::size_t n = 0;
  for (long a = lattice_lo(box.lo[u]); a <= lattice_hi(box.hi[u]); ++a)
    for (long b = lattice_lo(box.lo[v]); b <= lattice_hi(box.hi[v]); ++b) {
      long c = 0;
      const double wv = (offset - normal[u] * double(a) - normal[v] * double(b)) / normal[w];
      if (!near_integer(wv, kSnap * (1.0 + std::abs(wv)), c)) continue;
      if (double(c) < box.lo[w] - kSnap || double(c) > box.hi[w] + kSnap) continue;
      const P2 pt{double(a), double(b)};
      bool inside = true;
      for (std::size_t e = 0; e < hull.size() && inside; ++e) {
        const P2 p0 = hull[e], p1 = hull[(e + 1) % hull.size()];
        const double elen = std::hypot(p1.first - p0.first, p1.second - p0.second);
        inside = cross2(p0, p1, pt) >= -tol * elen;
      }
      n += inside;
    }
  return n;
}

/// Incremental 3D hull. Requires four affinely independent points at
/// indices i0..i3.
inline std::vector<HullFace> hull_faces(const std::vector<Point3>& pts, int i0, int i1, int i2, int i3,
                                        double tol) {
  std::vector<HullFace> faces;
  const Point3 inner = 0.25 * (pts[std::size_t(i0)] + pts[std::size_t(i1)] + pts[std::size_t(i2)] +
                               pts[std::size_t(i3)]);
  auto add = [&](int a, int b, int c) {
    HullFace f = make_face(pts, a, b, c);
    if (dot(f.normal, inner) > f.offset) f = make_face(pts, a, c, b);
    faces.push_back(f);
  };
  add(i0, i1, i2);
  add(i0, i1, i3);
  add(i0, i2, i3);
  add(i1, i2, i3);

  for (int pi = 0; pi < int(pts.size()); ++pi) {
    if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
    const Point3& p = pts[std::size_t(pi)];
    std::set<std::pair<int, int>> edges;
    bool any = false;
    for (auto& f : faces) {
      if (!f.alive) continue;
      if (dot(f.normal, p) - f.offset > tol * norm(f.normal)) {
        f.alive = false;
        any = true;
        edges.insert({f.a, f.b});
        edges.insert({f.b, f.c});
        edges.insert({f.c, f.a});
      }
    }
    if (!any) continue;
    for (const auto& [a, b] : edges)
      if (!edges.contains({b, a})) faces.push_back(make_face(pts, a, b, pi));
    std::erase_if(faces, [](const HullFace& f) { return !f.alive; });
  }
  return faces;
}

}  // namespace detail

/// Number of integer lattice points inside or on the convex hull of `points`.
/// Affinely degenerate inputs (coplanar, collinear, single point) use the
/// lower-dimensional hull.
inline std::size_t convex_hull_lattice_count(std::span<const Point3> points) {
  using namespace detail;
  if (points.empty()) throw InvalidInputError("convex hull of an empty point set");
  for (const Point3& p : points)
    if (!p.finite()) throw InvalidInputError("convex hull input must be finite");

  std::vector<Point3> pts = column_extremes(points);
  const Box box = bounding_box(pts);
  const double scale = 1.0 + norm(box.hi - box.lo);
  const double tol = 1e-9 * scale;

  const Point3 p0 = pts[0];
  std::size_t i1 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (distance(pts[i], p0) > distance(pts[i1], p0)) i1 = i;
  if (distance(pts[i1], p0) <= tol) {
    long c = 0;
    for (int k = 0; k < 3; ++k)
      if (!near_integer(p0[k], kSnap, c)) return 0;
    return 1;
  }

  const Point3 axis = pts[i1] - p0;
  std::size_t i2 = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double a = norm(cross(axis, pts[i] - p0));
    if (a > best) best = a, i2 = i;
  }
  if (best <= tol * norm(axis)) {
    // Collinear: the hull is the segment between the extreme projections.
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (dot(axis, pts[i] - p0) < dot(axis, pts[lo] - p0)) lo = i;
      if (dot(axis, pts[i] - p0) > dot(axis, pts[hi] - p0)) hi = i;
    }
    return count_segment(pts[lo], pts[hi], tol);
  }

  const Point3 normal = cross(axis, pts[i2] - p0);
  std::size_t i3 = 0;
  best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double h = std::abs(dot(normal, pts[i] - p0));
    if (h > best) best = h, i3 = i;
  }
  if (best <= tol * norm(normal)) return count_planar(pts, normal, tol);

  const auto faces = hull_faces(pts, 0, int(i1), int(i2), int(i3), tol);

  std::size_t count = 0;
  for (long x = lattice_lo(box.lo.x); x <= lattice_hi(box.hi.x); ++x)
    for (long y = lattice_lo(box.lo.y); y <= lattice_hi(box.hi.y); ++y) {
      double zlo = box.lo.z, zhi = box.hi.z;
      bool empty = false;
      for (const HullFace& f : faces) {
        const double rhs = f.offset - f.normal.x * double(x) - f.normal.y * double(y);
        const double slack = tol * norm(f.normal);
        if (std::abs(f.normal.z) <= slack) {
          if (rhs < -slack) {
            empty = true;
            break;
          }
          continue;
        }
        const double bound = rhs / f.normal.z;
        if (f.normal.z > 0)
          zhi = std::min(zhi, bound);
        else
          zlo = std::max(zlo, bound);
      }
      if (empty) continue;
      const long a = lattice_lo(zlo), b = lattice_hi(zhi);
      if (b >= a) count += std::size_t(b - a + 1);
    }
  return count;
}

inline std::size_t convex_hull_lattice_count(std::span<const Index3> voxels) {
  std::vector<Point3> pts;
  pts.reserve(voxels.size());
  for (const Index3& v : voxels) pts.push_back(v.to_point());
  return convex_hull_lattice_count(std::span<const Point3>(pts));
}

}  // namespace vox3d
