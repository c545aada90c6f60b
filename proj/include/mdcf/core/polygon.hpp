#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mdcf/core/error.hpp"
#include "mdcf/core/real.hpp"

namespace mdcf {

struct Point {
  Rational x;
  Rational y;

  friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

/// The closed half-plane { (x, y) : c0 + cx*x + cy*y >= 0 }.
struct HalfPlane {
  Rational c0;
  Rational cx;
  Rational cy;

  [[nodiscard]] Rational eval(const Point& p) const { return c0 + cx * p.x + cy * p.y; }
};

inline Rational cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Convex polygon with exact rational vertices in counterclockwise order.
/// Normalized on construction: duplicate and collinear vertices are removed,
/// and a polygon with zero area is stored as the empty polygon. Boundary
/// openness is not modelled; every comparison downstream is by area.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Point> vertices) : v_(std::move(vertices)) { normalize(); }

  /// Axis-aligned rectangle [x0,x1] x [y0,y1].
  static ConvexPolygon box(const Rational& x0, const Rational& y0, const Rational& x1, const Rational& y1) {
    return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  }

  [[nodiscard]] const std::vector<Point>& vertices() const { return v_; }
  [[nodiscard]] std::size_t size() const { return v_.size(); }
  [[nodiscard]] bool empty() const { return v_.empty(); }

  /// Signed shoelace sum / 2; nonnegative after normalization.
  [[nodiscard]] Rational area() const {
    if (v_.size() < 3) return 0;
    Rational twice = 0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const Point& a = v_[i];
      const Point& b = v_[(i + 1) % v_.size()];
      twice += a.x * b.y - a.y * b.x;
    }
    return twice / 2;
  }

  /// Closed-set membership.
  [[nodiscard]] bool contains(const Point& p) const {
    if (v_.size() < 3) return false;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (sgn(cross(v_[i], v_[(i + 1) % v_.size()], p)) < 0) return false;
    }
    return true;
  }

  /// Interior membership (strictly inside every edge).
  [[nodiscard]] bool contains_interior(const Point& p) const {
    if (v_.size() < 3) return false;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (sgn(cross(v_[i], v_[(i + 1) % v_.size()], p)) <= 0) return false;
    }
    return true;
  }

  /// The inward half-plane of edge i (from vertex i to vertex i+1).
  [[nodiscard]] HalfPlane edge_halfplane(std::size_t i) const {
    const Point& a = v_[i];
    const Point& b = v_[(i + 1) % v_.size()];
    // cross(a, b, p) >= 0  <=>  (b-a) x (p-a) >= 0
    Rational dx = b.x - a.x;
    Rational dy = b.y - a.y;
    return {dy * a.x - dx * a.y, -dy, dx};
  }

  [[nodiscard]] bool is_convex() const {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (sgn(cross(v_[i], v_[(i + 1) % v_.size()], v_[(i + 2) % v_.size()])) <= 0) return false;
    }
    return true;
  }

  friend bool operator==(const ConvexPolygon& a, const ConvexPolygon& b) { return a.v_ == b.v_; }

 private:
  void normalize() {
    // Drop repeated vertices.
    std::vector<Point> w;
    w.reserve(v_.size());
    for (auto& p : v_) {
      if (w.empty() || w.back() != p) w.push_back(std::move(p));
    }
    while (w.size() > 1 && w.front() == w.back()) w.pop_back();
    // Drop collinear vertices until stable.
    bool changed = true;
    while (changed && w.size() >= 3) {
      changed = false;
      for (std::size_t i = 0; i < w.size() && w.size() >= 3; ++i) {
        const std::size_t n = w.size();
        if (sgn(cross(w[(i + n - 1) % n], w[i], w[(i + 1) % n])) == 0) {
          w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
    if (w.size() < 3) {
      v_.clear();
      return;
    }
    v_ = std::move(w);
    if (sgn(area()) < 0) {
      std::reverse(v_.begin(), v_.end());
    }
    // Canonical start: lexicographically smallest vertex, so equal polygons compare equal.
    std::size_t best = 0;
    for (std::size_t i = 1; i < v_.size(); ++i) {
      if (v_[i].x < v_[best].x || (v_[i].x == v_[best].x && v_[i].y < v_[best].y)) best = i;
    }
    std::rotate(v_.begin(), v_.begin() + static_cast<std::ptrdiff_t>(best), v_.end());
  }

  std::vector<Point> v_;
};

inline Rational polygon_area(const ConvexPolygon& p) { return p.area(); }

/// Sutherland–Hodgman step against one half-plane, exact.
inline ConvexPolygon clip(const ConvexPolygon& p, const HalfPlane& h) {
  const auto& v = p.vertices();
  if (v.empty()) return {};
  std::vector<Point> out;
  out.reserve(v.size() + 1);
  const std::size_t n = v.size();
  std::vector<Rational> val(n);
  for (std::size_t i = 0; i < n; ++i) val[i] = h.eval(v[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (sgn(val[i]) >= 0) out.push_back(v[i]);
    if ((sgn(val[i]) > 0 && sgn(val[j]) < 0) || (sgn(val[i]) < 0 && sgn(val[j]) > 0)) {
      Rational t = val[i] / (val[i] - val[j]);
      out.push_back({v[i].x + t * (v[j].x - v[i].x), v[i].y + t * (v[j].y - v[i].y)});
    }
  }
  return ConvexPolygon(std::move(out));
}

/// Exact intersection of two convex polygons (possibly empty).
inline ConvexPolygon polygon_clip(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.empty() || b.empty()) return {};
  ConvexPolygon r = a;
  for (std::size_t i = 0; i < b.size() && !r.empty(); ++i) r = clip(r, b.edge_halfplane(i));
  return r;
}

inline Rational total_area(const std::vector<ConvexPolygon>& u) {
  Rational s = 0;
  for (const auto& p : u) s += p.area();
  return s;
}

/// Throws PreconditionError when two polygons of the list overlap in area.
inline void require_interior_disjoint(const std::vector<ConvexPolygon>& u, const char* what) {
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      if (sgn(polygon_clip(u[i], u[j]).area()) != 0)
        throw PreconditionError(std::string(what) + ": polygons overlap");
}

/// Exact area of the symmetric difference of two unions of pairwise
/// interior-disjoint convex polygons.
inline Rational union_symm_diff_area(const std::vector<ConvexPolygon>& u, const std::vector<ConvexPolygon>& v) {
  require_interior_disjoint(u, "union_symm_diff_area(u)");
  require_interior_disjoint(v, "union_symm_diff_area(v)");
  Rational overlap = 0;
  for (const auto& a : u)
    for (const auto& b : v) overlap += polygon_clip(a, b).area();
  return total_area(u) + total_area(v) - 2 * overlap;
}

/// (x1, x2) -> (x2/x1 - b, 1/x1 - a), the branch of the nearest-integer
/// Jacobi–Perron map on the cylinder with digits (a, b).
inline Point projective_map(const Point& p, const Integer& a, const Integer& b) {
  return {p.y / p.x - b, 1 / p.x - a};
}

/// Inverse of projective_map: (y1, y2) -> (1/(y2 + a), (y1 + b)/(y2 + a)).
inline Point projective_unmap(const Point& q, const Integer& a, const Integer& b) {
  Rational w = q.y + a;
  return {1 / w, (q.x + b) / w};
}

/// Exact image of a polygon under projective_map. The map is projective in
/// homogeneous coordinates, so it sends segments to segments and convex sets
/// on one side of x1 = 0 to convex sets.
inline ConvexPolygon projective_image(const ConvexPolygon& p, const Integer& a, const Integer& b) {
  if (p.empty()) return {};
  int side = 0;
  for (const auto& v : p.vertices()) {
    int s = sgn(v.x);
    if (s == 0 || (side != 0 && s != side)) {
      throw DomainError("projective_image: polygon meets the line x1 = 0");
    }
    side = s;
  }
  std::vector<Point> w;
  w.reserve(p.size());
  for (const auto& v : p.vertices()) w.push_back(projective_map(v, a, b));
  return ConvexPolygon(std::move(w));
}

/// Image under (x, y) -> (sx*x, sy*y) with sx, sy in {+1, -1}.
inline ConvexPolygon reflect(const ConvexPolygon& p, int sx, int sy) {
  std::vector<Point> w;
  w.reserve(p.size());
  for (const auto& v : p.vertices()) w.push_back({sx * v.x, sy * v.y});
  return ConvexPolygon(std::move(w));
}

}  // namespace mdcf
