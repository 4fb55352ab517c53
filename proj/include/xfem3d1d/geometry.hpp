#pragma once

// Geometry of a straight centreline: distances, projections, planar slices of
// convex polyhedra orthogonal to the centreline, and the polar covering of a
// section polygon around the centreline trace.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace xfem3d1d {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Point2 = Vector2<double>;
using Point3 = Vector3<double>;

/// Straight segment λ(s) = a + s·t, s ∈ [0, S], with a fixed orthonormal
/// section frame (n1, n2) orthogonal to t.
template <typename Scalar>
class Segment {
 public:
  Segment(const Vector3<Scalar>& a, const Vector3<Scalar>& b) : a_(a), b_(b) {
    using std::abs;
    const Vector3<Scalar> d = b - a;
    length_ = d.norm();
    if (!(length_ > Scalar(0))) throw std::invalid_argument("Segment: zero length");
    tangent_ = d / length_;
    // Coordinate axis least aligned with t, orthogonalized.
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (abs(tangent_[i]) < abs(tangent_[k])) k = i;
    Vector3<Scalar> e = Vector3<Scalar>::Unit(k);
    normal1_ = (e - e.dot(tangent_) * tangent_).normalized();
    normal2_ = tangent_.cross(normal1_);
  }

  const Vector3<Scalar>& a() const { return a_; }
  const Vector3<Scalar>& b() const { return b_; }
  Scalar length() const { return length_; }
  const Vector3<Scalar>& tangent() const { return tangent_; }
  const Vector3<Scalar>& normal1() const { return normal1_; }
  const Vector3<Scalar>& normal2() const { return normal2_; }

  Vector3<Scalar> point(Scalar s) const { return a_ + s * tangent_; }

  /// Abscissa of the orthogonal projection onto the infinite line (unclamped).
  Scalar abscissa(const Vector3<Scalar>& x) const { return (x - a_).dot(tangent_); }

  /// Coordinates of x in the section frame; independent of s because the
  /// frame axes are orthogonal to t.
  Vector2<Scalar> section_coords(const Vector3<Scalar>& x) const {
    const Vector3<Scalar> r = x - a_;
    return {r.dot(normal1_), r.dot(normal2_)};
  }

  Vector3<Scalar> from_section(Scalar s, const Vector2<Scalar>& uv) const {
    return point(s) + uv[0] * normal1_ + uv[1] * normal2_;
  }

 private:
  Vector3<Scalar> a_, b_, tangent_, normal1_, normal2_;
  Scalar length_{};
};

inline constexpr std::array<std::array<int, 2>, 6> kTetEdgesForDistance{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

template <typename Scalar>
struct Cylinder {
  Segment<Scalar> axis;
  Scalar radius;
};

template <typename Scalar>
struct Projection {
  Scalar distance;
  Scalar s;  // clamped to [0, S]
};

template <typename Scalar>
Projection<Scalar> distance_and_projection(const Vector3<Scalar>& x, const Segment<Scalar>& lam) {
  const Scalar s = std::clamp(lam.abscissa(x), Scalar(0), lam.length());
  return {(x - lam.point(s)).norm(), s};
}

/// Projection abscissas of the four vertices, sorted ascending and clamped to [0, S].
template <typename Scalar>
std::array<Scalar, 4> vertex_abscissas(const std::array<Vector3<Scalar>, 4>& tet,
                                       const Segment<Scalar>& lam) {
  std::array<Scalar, 4> s;
  for (int i = 0; i < 4; ++i) s[i] = std::clamp(lam.abscissa(tet[i]), Scalar(0), lam.length());
  std::sort(s.begin(), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// Closest-point queries

/// Squared distance between segments [p0, p1] and [q0, q1].
template <typename Scalar>
Scalar segment_segment_distance2(const Vector3<Scalar>& p0, const Vector3<Scalar>& p1,
                                 const Vector3<Scalar>& q0, const Vector3<Scalar>& q1) {
  const Vector3<Scalar> d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const Scalar a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  const Scalar tiny = std::numeric_limits<Scalar>::min();
  Scalar s(0), t(0);
  if (a <= tiny && e <= tiny) return r.squaredNorm();
  if (a <= tiny) {
    t = std::clamp(f / e, Scalar(0), Scalar(1));
  } else {
    const Scalar c = d1.dot(r);
    if (e <= tiny) {
      s = std::clamp(-c / a, Scalar(0), Scalar(1));
    } else {
      const Scalar b = d1.dot(d2), denom = a * e - b * b;
      s = denom > tiny ? std::clamp((b * f - c * e) / denom, Scalar(0), Scalar(1)) : Scalar(0);
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, Scalar(0), Scalar(1));
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, Scalar(0), Scalar(1));
      }
    }
  }
  return (p0 + s * d1 - (q0 + t * d2)).squaredNorm();
}

/// Closest point of triangle (a, b, c) to p (Voronoi-region walk).
template <typename Scalar>
Vector3<Scalar> closest_point_on_triangle(const Vector3<Scalar>& p, const Vector3<Scalar>& a,
                                          const Vector3<Scalar>& b, const Vector3<Scalar>& c) {
  const Vector3<Scalar> ab = b - a, ac = c - a, ap = p - a;
  const Scalar d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vector3<Scalar> bp = p - b;
  const Scalar d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Vector3<Scalar> cp = p - c;
  const Scalar d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const Scalar denom = 1 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Distance between a segment and a (solid) tetrahedron; zero when they meet.
template <typename Scalar>
Scalar segment_tet_distance(const Segment<Scalar>& lam, const std::array<Vector3<Scalar>, 4>& tet) {
  using std::sqrt;
  // Clip the segment against the four face half-spaces.
  const Vector3<Scalar> p0 = lam.a(), d = lam.b() - lam.a();
  Scalar t0(0), t1(1);
  bool meets = true;
  static constexpr std::array<std::array<int, 4>, 4> faces{{{1, 2, 3, 0}, {0, 3, 2, 1}, {0, 1, 3, 2}, {0, 2, 1, 3}}};
  for (const auto& f : faces) {
    Vector3<Scalar> n = (tet[f[1]] - tet[f[0]]).cross(tet[f[2]] - tet[f[0]]);
    if (n.dot(tet[f[3]] - tet[f[0]]) > 0) n = -n;  // outward
    const Scalar num = n.dot(tet[f[0]] - p0), den = n.dot(d);
    if (den == Scalar(0)) {
      if (num < 0) meets = false;
    } else if (den > 0) {
      t1 = std::min(t1, num / den);
    } else {
      t0 = std::max(t0, num / den);
    }
  }
  if (meets && t0 <= t1) return Scalar(0);
  Scalar best = std::numeric_limits<Scalar>::max();
  for (const auto& f : faces) {
    const auto& a = tet[f[0]];
    const auto& b = tet[f[1]];
    const auto& c = tet[f[2]];
    for (const auto* p : {&lam.a(), &lam.b()})
      best = std::min(best, Scalar((*p - closest_point_on_triangle(*p, a, b, c)).squaredNorm()));
  }
  for (const auto& e : kTetEdgesForDistance)
    best = std::min(best, segment_segment_distance2(lam.a(), lam.b(), tet[e[0]], tet[e[1]]));
  return sqrt(best);
}

// ---------------------------------------------------------------------------
// Section polygons

template <typename Scalar>
Scalar cross2(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a[0] * b[1] - a[1] * b[0];
}

/// Convex section of a polyhedron by the plane orthogonal to Λ at abscissa s,
/// in the section frame. Vertices are counter-clockwise; `center` is the trace
/// of the centreline (the frame origin).
template <typename Scalar>
struct SectionPolygon {
  Scalar s{};
  std::vector<Vector2<Scalar>> vertices;
  Vector2<Scalar> center = Vector2<Scalar>::Zero();

  bool empty() const { return vertices.size() < 3; }

  Scalar area() const {
    if (empty()) return Scalar(0);
    Scalar a(0);
    for (std::size_t i = 0; i < vertices.size(); ++i)
      a += cross2(vertices[i], vertices[(i + 1) % vertices.size()]);
    return a / 2;
  }

  Scalar diameter() const {
    Scalar d(0);
    for (const auto& p : vertices)
      for (const auto& q : vertices) d = std::max(d, Scalar((p - q).norm()));
    return d;
  }
};

/// Monotone-chain convex hull, counter-clockwise, near-duplicate points merged.
template <typename Scalar>
std::vector<Vector2<Scalar>> convex_hull(std::vector<Vector2<Scalar>> pts, Scalar tol) {
  std::sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) {
    return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
  });
  std::vector<Vector2<Scalar>> unique;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : unique)
      if ((p - q).norm() <= tol) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(p);
  }
  if (unique.size() < 3) return unique;
  std::sort(unique.begin(), unique.end(), [](const auto& p, const auto& q) {
    return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
  });
  std::vector<Vector2<Scalar>> hull(2 * unique.size());
  std::size_t k = 0;
  const auto turn = [](const auto& o, const auto& a, const auto& b) {
    return cross2(Vector2<Scalar>(a - o), Vector2<Scalar>(b - o));
  };
  const Scalar area_tol = tol * tol;
  for (const auto& p : unique) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= area_tol) --k;
    hull[k++] = p;
  }
  for (std::size_t i = unique.size() - 1, lower = k + 1; i-- > 0;) {
    const auto& p = unique[i];
    while (k >= lower && turn(hull[k - 2], hull[k - 1], p) <= area_tol) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

/// Slice of the convex polyhedron with the given vertices and edge list.
template <typename Scalar>
SectionPolygon<Scalar> slice_convex(std::span<const Vector3<Scalar>> vertices,
                                    std::span<const std::array<int, 2>> edges,
                                    const Segment<Scalar>& lam, Scalar s) {
  using std::abs;
  SectionPolygon<Scalar> poly;
  poly.s = s;
  Scalar scale(0);
  for (const auto& v : vertices)
    for (const auto& w : vertices) scale = std::max(scale, Scalar((v - w).norm()));
  const Scalar tol = scale * Scalar(64) * std::numeric_limits<Scalar>::epsilon();

  std::vector<Scalar> h(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) h[i] = lam.abscissa(vertices[i]) - s;

  std::vector<Vector2<Scalar>> pts;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (abs(h[i]) <= tol) pts.push_back(lam.section_coords(vertices[i]));
  for (const auto& e : edges) {
    const Scalar h0 = h[e[0]], h1 = h[e[1]];
    if (abs(h0) <= tol || abs(h1) <= tol) continue;
    if ((h0 < 0) == (h1 < 0)) continue;
    const Scalar t = h0 / (h0 - h1);
    const Vector3<Scalar> x = vertices[e[0]] + t * (vertices[e[1]] - vertices[e[0]]);
    pts.push_back(lam.section_coords(x));
  }
  poly.vertices = convex_hull(std::move(pts), tol);
  return poly;
}

inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

template <typename Scalar>
SectionPolygon<Scalar> slice_tet(const std::array<Vector3<Scalar>, 4>& tet,
                                 const Segment<Scalar>& lam, Scalar s) {
  return slice_convex<Scalar>(std::span<const Vector3<Scalar>>(tet.data(), 4),
                              std::span<const std::array<int, 2>>(kTetEdges), lam, s);
}

// ---------------------------------------------------------------------------
// Polar covering of a section polygon

enum class Region { inside, outside };

/// Radial bound ρ(θ) of a polar piece, as seen from the centreline trace.
template <typename Scalar>
struct RadialBound {
  enum class Kind { origin, circle, line };
  Kind kind = Kind::origin;
  Scalar distance{};  // line: distance from the center to the line; circle: R
  Scalar foot{};      // line: direction angle of the foot of the perpendicular

  static RadialBound origin() { return {Kind::origin, Scalar(0), Scalar(0)}; }
  static RadialBound circle(Scalar r) { return {Kind::circle, r, Scalar(0)}; }
  static RadialBound line(Scalar d, Scalar beta) { return {Kind::line, d, beta}; }

  Scalar operator()(Scalar theta) const {
    using std::cos;
    switch (kind) {
      case Kind::origin: return Scalar(0);
      case Kind::circle: return distance;
      case Kind::line: return distance / cos(theta - foot);
    }
    return Scalar(0);
  }

  /// ∫ ρ(θ)²/2 dθ over [t0, t1].
  Scalar half_square_integral(Scalar t0, Scalar t1) const {
    using std::tan;
    switch (kind) {
      case Kind::origin: return Scalar(0);
      case Kind::circle: return distance * distance * (t1 - t0) / 2;
      case Kind::line: return distance * distance * (tan(t1 - foot) - tan(t0 - foot)) / 2;
    }
    return Scalar(0);
  }
};

/// One cell of the covering: {center + ρ(cosθ, sinθ) : θ ∈ [theta0, theta1],
/// inner(θ) ≤ ρ ≤ outer(θ)}, lying entirely inside or outside the circle.
/// When the center lies in the polygon, inner is the origin and the cell is
/// (part of) the fan triangle over one polygon edge.
template <typename Scalar>
struct CoverPiece {
  Vector2<Scalar> center;
  Scalar theta0{}, theta1{};
  RadialBound<Scalar> inner, outer;
  Region region = Region::inside;

  Scalar area() const {
    return outer.half_square_integral(theta0, theta1) - inner.half_square_integral(theta0, theta1);
  }

  bool contains(const Vector2<Scalar>& p) const {
    using std::atan2;
    using std::cos;
    using std::sin;
    const Vector2<Scalar> d = p - center;
    const Scalar rho = d.norm();
    const Scalar mid = (theta0 + theta1) / 2;
    // Angle of d measured relative to the cell mid-direction.
    const Scalar rel = atan2(cross2(Vector2<Scalar>(cos(mid), sin(mid)), d),
                             d.dot(Vector2<Scalar>(cos(mid), sin(mid))));
    const Scalar theta = mid + rel;
    if (theta < theta0 || theta > theta1) return false;
    return rho >= inner(theta) && rho <= outer(theta);
  }
};

namespace detail {

template <typename Scalar>
Scalar wrap_near(Scalar angle, Scalar reference) {
  using std::round;
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  return angle - two_pi * round((angle - reference) / two_pi);
}

// Splits [t0, t1] at the circle crossings of the given bounds and emits the
// inside/outside pieces of the annular cell {inner ≤ ρ ≤ outer}.
template <typename Scalar>
void emit_cell(const Vector2<Scalar>& center, Scalar t0, Scalar t1, const RadialBound<Scalar>& inner,
               const RadialBound<Scalar>& outer, Scalar R, std::vector<CoverPiece<Scalar>>& out) {
  using std::acos;
  std::vector<Scalar> cuts{t0, t1};
  for (const auto* b : {&inner, &outer}) {
    if (b->kind != RadialBound<Scalar>::Kind::line || b->distance >= R) continue;
    const Scalar foot = wrap_near(b->foot, (t0 + t1) / 2);
    const Scalar half = acos(b->distance / R);
    for (Scalar c : {foot - half, foot + half})
      if (c > t0 && c < t1) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  const auto circle = RadialBound<Scalar>::circle(R);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Scalar a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const Scalar mid = (a + b) / 2;
    const Scalar lo = inner(mid), hi = outer(mid);
    if (hi <= R) {
      out.push_back({center, a, b, inner, outer, Region::inside});
    } else if (lo >= R) {
      out.push_back({center, a, b, inner, outer, Region::outside});
    } else {
      out.push_back({center, a, b, inner, circle, Region::inside});
      out.push_back({center, a, b, circle, outer, Region::outside});
    }
  }
}

}  // namespace detail

/// Covers a convex section polygon by polar pieces around poly.center, split by
/// the circle of radius R. Pieces with area below 1e-14·area(poly) are dropped.
template <typename Scalar>
std::vector<CoverPiece<Scalar>> cover_polygon(const SectionPolygon<Scalar>& poly, Scalar R) {
  using std::abs;
  using std::atan2;
  std::vector<CoverPiece<Scalar>> pieces;
  if (poly.empty()) return pieces;
  const Scalar area = poly.area();
  if (!(area > Scalar(0))) {
    if (area < Scalar(0)) throw std::invalid_argument("cover_polygon: polygon is not counter-clockwise");
    return pieces;
  }
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2<Scalar> e1 = v[(i + 1) % n] - v[i];
    const Vector2<Scalar> e2 = v[(i + 2) % n] - v[(i + 1) % n];
    if (cross2(e1, e2) < -Scalar(1e-12) * e1.norm() * e2.norm())
      throw std::invalid_argument("cover_polygon: polygon is not convex");
  }
  const Vector2<Scalar> c = poly.center;
  const Scalar tol = Scalar(1e-12) * poly.diameter();

  // Signed distance of c from each edge line, positive on the polygon side.
  std::vector<Scalar> delta(n);
  std::vector<Scalar> foot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2<Scalar> e = v[(i + 1) % n] - v[i];
    const Vector2<Scalar> outward = Vector2<Scalar>(e[1], -e[0]).normalized();
    delta[i] = (v[i] - c).dot(outward);
    // Direction from c towards the line along its normal.
    const Vector2<Scalar> towards = delta[i] >= 0 ? outward : Vector2<Scalar>(-outward);
    foot[i] = atan2(towards[1], towards[0]);
  }
  const bool center_inside = std::all_of(delta.begin(), delta.end(), [&](Scalar d) { return d >= -tol; });

  std::vector<CoverPiece<Scalar>> raw;
  if (center_inside) {
    for (std::size_t i = 0; i < n; ++i) {
      if (delta[i] <= tol) continue;  // c lies on this edge: degenerate fan triangle
      const Vector2<Scalar> p = v[i] - c, q = v[(i + 1) % n] - c;
      const Scalar t0 = atan2(p[1], p[0]);
      const Scalar t1 = t0 + atan2(cross2(p, q), p.dot(q));
      detail::emit_cell(c, t0, t1, RadialBound<Scalar>::origin(),
                        RadialBound<Scalar>::line(delta[i], foot[i]), R, raw);
    }
  } else {
    // Angular sweep: every ray from c crossing the polygon enters through a
    // front edge (delta < 0) and leaves through a back edge (delta > 0).
    Vector2<Scalar> centroid = Vector2<Scalar>::Zero();
    for (const auto& p : v) centroid += p;
    centroid /= Scalar(n);
    const Vector2<Scalar> ref = centroid - c;
    const Scalar ref_angle = atan2(ref[1], ref[0]);
    std::vector<Scalar> ang(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vector2<Scalar> d = v[i] - c;
      ang[i] = ref_angle + atan2(cross2(ref, d), ref.dot(d));
    }
    std::vector<Scalar> sweep = ang;
    std::sort(sweep.begin(), sweep.end());
    for (std::size_t k = 0; k + 1 < sweep.size(); ++k) {
      const Scalar a = sweep[k], b = sweep[k + 1];
      if (!(b - a > Scalar(1e-14))) continue;
      const Scalar mid = (a + b) / 2;
      int front = -1, back = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (abs(delta[i]) <= tol) continue;
        const Scalar lo = std::min(ang[i], ang[(i + 1) % n]);
        const Scalar hi = std::max(ang[i], ang[(i + 1) % n]);
        if (mid < lo || mid > hi) continue;
        (delta[i] < 0 ? front : back) = static_cast<int>(i);
      }
      if (front < 0 || back < 0) continue;
      detail::emit_cell(c, a, b, RadialBound<Scalar>::line(-delta[front], foot[front]),
                        RadialBound<Scalar>::line(delta[back], foot[back]), R, raw);
    }
  }
  const Scalar min_area = Scalar(1e-14) * area;
  for (auto& p : raw)
    if (p.area() > min_area) pieces.push_back(p);
  return pieces;
}

}  // namespace xfem3d1d
