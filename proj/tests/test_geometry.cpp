#include "xfem3d1d/geometry.hpp"
#include "xfem3d1d/mesh.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <random>

using namespace xfem3d1d;

namespace {

const Segment<double> kZAxis{Point3(0, 0, -1), Point3(0, 0, 1)};
const Segment<double> kEdge{Point3(0, 0, 0), Point3(0, 0, 1)};

std::vector<Point3> unit_cube_vertices() {
  std::vector<Point3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  return v;
}

std::vector<std::array<int, 2>> unit_cube_edges() {
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      if (std::popcount(static_cast<unsigned>(i ^ j)) == 1) e.push_back({i, j});
  return e;
}

SectionPolygon<double> cube_section(double s) {
  const auto v = unit_cube_vertices();
  const auto e = unit_cube_edges();
  return slice_convex<double>(v, e, kEdge, s);
}

double area_sum(const std::vector<CoverPiece<double>>& pieces) {
  double a = 0;
  for (const auto& p : pieces) a += p.area();
  return a;
}

}  // namespace

TEST(Distance, PythagorasOnAxis) {
  const auto p = distance_and_projection(Point3(3, 4, 0.5), kZAxis);
  EXPECT_NEAR(p.distance, 5.0, 1e-15);
  EXPECT_NEAR(p.s, 1.5, 1e-15);
}

TEST(Distance, PointOnSegment) {
  EXPECT_NEAR(distance_and_projection(Point3(0, 0, 0.3), kZAxis).distance, 0.0, 1e-15);
}

TEST(Distance, ClampsToEndpoint) {
  const auto p = distance_and_projection(Point3(0, 0, 2), kZAxis);
  EXPECT_NEAR(p.distance, 1.0, 1e-15);
  EXPECT_NEAR(p.s, 2.0, 1e-15);
}

TEST(Distance, MinimalOverSegment) {
  const Segment<double> lam(Point3(0.1, -0.2, 0.3), Point3(1.1, 0.7, -0.4));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2, 2), t(0, 1);
  for (int i = 0; i < 20; ++i) {
    const Point3 x(u(rng), u(rng), u(rng));
    const double d = distance_and_projection(x, lam).distance;
    for (int k = 0; k < 100; ++k) EXPECT_LE(d, (x - lam.point(t(rng) * lam.length())).norm() + 1e-14);
  }
}

TEST(Segment, FrameIsOrthonormal) {
  const Segment<double> lam(Point3(0, 0, 0), Point3(1, 2, 3));
  EXPECT_NEAR(lam.normal1().norm(), 1.0, 1e-15);
  EXPECT_NEAR(lam.normal2().norm(), 1.0, 1e-15);
  EXPECT_NEAR(lam.normal1().dot(lam.normal2()), 0.0, 1e-15);
  EXPECT_NEAR(lam.normal1().dot(lam.tangent()), 0.0, 1e-15);
  EXPECT_NEAR(lam.normal2().dot(lam.tangent()), 0.0, 1e-15);
}

TEST(SegmentTetDistance, MatchesSampling) {
  const std::array<Point3, 4> tet{Point3(0.5, 0.2, 0), Point3(1.5, 0.3, 0.1), Point3(0.7, 1.2, 0.2),
                                  Point3(0.8, 0.5, 1.0)};
  const double d = segment_tet_distance(kZAxis, tet);
  // Brute force over convex combinations and segment points.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  double best = 1e300;
  for (int i = 0; i < 200000; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a + b + c > 1) continue;
    const Point3 x = tet[0] + a * (tet[1] - tet[0]) + b * (tet[2] - tet[0]) + c * (tet[3] - tet[0]);
    best = std::min(best, distance_and_projection(x, kZAxis).distance);
  }
  EXPECT_LE(d, best + 1e-12);
  EXPECT_NEAR(d, best, 2e-2);
}

TEST(SegmentTetDistance, ZeroWhenPierced) {
  const std::array<Point3, 4> tet{Point3(-0.5, -0.5, -0.5), Point3(1, 0, -0.5), Point3(0, 1, -0.5),
                                  Point3(0, 0, 0.5)};
  EXPECT_EQ(segment_tet_distance(kZAxis, tet), 0.0);
}

TEST(VertexAbscissas, AxisAlignedCornerTet) {
  const std::array<Point3, 4> tet{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)};
  const auto s = vertex_abscissas(tet, kEdge);
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(s[2], 0.0);
  EXPECT_EQ(s[3], 1.0);
}

TEST(VertexAbscissas, SymmetricTetIsSymmetric) {
  const double c = 0.4;
  const std::array<Point3, 4> tet{Point3(1, 1, c + 0.3), Point3(-1, -1, c + 0.3), Point3(1, -1, c - 0.3),
                                  Point3(-1, 1, c - 0.3)};
  const auto s = vertex_abscissas(tet, kZAxis);
  // kZAxis starts at z = −1.
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s[i] + s[3 - i], 2 * (c + 1), 1e-14);
}

TEST(VertexAbscissas, UnitCubeSplitProjectsToEndpoints) {
  const std::vector<double> xs{0, 1};
  const TetMesh mesh = tensor_box_mesh(xs, xs, xs);
  ASSERT_EQ(mesh.num_tets(), 6);
  for (int e = 0; e < mesh.num_tets(); ++e)
    for (double s : vertex_abscissas(mesh.tet_points(e), kEdge)) EXPECT_TRUE(s == 0.0 || s == 1.0);
}

TEST(Slice, UnitCubeSectionIsUnitSquare) {
  for (double s : {0.1, 0.5, 0.9}) {
    const auto poly = cube_section(s);
    ASSERT_EQ(poly.vertices.size(), 4u);
    EXPECT_NEAR(poly.area(), 1.0, 1e-14);
    EXPECT_TRUE(poly.center.isZero());
    for (const auto& v : poly.vertices) {
      EXPECT_NEAR(v[0] * (1 - v[0]), 0.0, 1e-14);
      EXPECT_NEAR(v[1] * (1 - v[1]), 0.0, 1e-14);
    }
  }
}

TEST(Slice, OutsideTetIsEmpty) {
  const std::array<Point3, 4> tet{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)};
  const Segment<double> longer(Point3(0, 0, 0), Point3(0, 0, 3));
  EXPECT_TRUE(slice_tet(tet, longer, 1.5).empty());
}

TEST(Slice, MidSliceAreaMatchesMonteCarloSlab) {
  const std::array<Point3, 4> tet{Point3(0.1, 0.1, 0.05), Point3(0.9, 0.2, 0.2), Point3(0.3, 0.8, 0.4),
                                  Point3(0.4, 0.3, 0.95)};
  const double s = 0.45, h = 0.02;
  const double area = slice_tet(tet, kEdge, s).area();
  TetGeometry geo(tet);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 400000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const Point3 x(u(rng), u(rng), s - h + 2 * h * u(rng));
    if (geo.barycentric(x).minCoeff() >= 0) ++hits;
  }
  const double estimate = static_cast<double>(hits) / n;  // box cross-section is the unit square
  EXPECT_NEAR(area, estimate, 0.03 * area);
}

TEST(Slice, AreaIsPiecewiseQuadratic) {
  const std::array<Point3, 4> tet{Point3(0.1, 0.1, 0.05), Point3(0.9, 0.2, 0.2), Point3(0.3, 0.8, 0.4),
                                  Point3(0.4, 0.3, 0.95)};
  const auto sv = vertex_abscissas(tet, kEdge);
  for (int t = 0; t < 3; ++t) {
    const double a = sv[t], b = sv[t + 1];
    const auto A = [&](double x) { return slice_tet(tet, kEdge, a + (b - a) * x).area(); };
    const double x0 = 0.2, x1 = 0.5, x2 = 0.8, x3 = 0.65;
    const double f0 = A(x0), f1 = A(x1), f2 = A(x2);
    const double p = f0 * (x3 - x1) * (x3 - x2) / ((x0 - x1) * (x0 - x2)) +
                     f1 * (x3 - x0) * (x3 - x2) / ((x1 - x0) * (x1 - x2)) +
                     f2 * (x3 - x0) * (x3 - x1) / ((x2 - x0) * (x2 - x1));
    EXPECT_NEAR(p, A(x3), 1e-10);
  }
}

TEST(Cover, SquareWithCornerCenter) {
  const auto poly = cube_section(0.5);
  const auto pieces = cover_polygon(poly, 0.1);
  // Two fan triangles (edges x = 1, y = 1), each split by the quarter circle.
  ASSERT_EQ(pieces.size(), 4u);
  double inside = 0;
  int n_inside = 0;
  for (const auto& p : pieces)
    if (p.region == Region::inside) {
      inside += p.area();
      ++n_inside;
    }
  EXPECT_EQ(n_inside, 2);
  EXPECT_NEAR(inside, std::numbers::pi * 0.01 / 4, 1e-14);
  EXPECT_NEAR(area_sum(pieces), 1.0, 1e-12);
}

TEST(Cover, LargeCircleGivesOnlyInsidePieces) {
  const auto pieces = cover_polygon(cube_section(0.5), 2.0);
  ASSERT_FALSE(pieces.empty());
  for (const auto& p : pieces) EXPECT_EQ(p.region, Region::inside);
  EXPECT_NEAR(area_sum(pieces), 1.0, 1e-12);
}

TEST(Cover, CutAnglesAreCircleEdgeIntersections) {
  SectionPolygon<double> tri;
  tri.vertices = {Point2(-0.5, -0.3), Point2(0.6, -0.3), Point2(0.0, 0.7)};
  const double R = 0.4;
  const auto pieces = cover_polygon(tri, R);
  EXPECT_NEAR(area_sum(pieces), tri.area(), 1e-12 * tri.area());
  // The bottom edge y = −0.3 meets the circle at θ = −π/2 ± acos(0.3/0.4).
  const double half = std::acos(0.3 / 0.4);
  for (double cut : {-std::numbers::pi / 2 - half, -std::numbers::pi / 2 + half}) {
    bool found = false;
    for (const auto& p : pieces)
      for (double t : {p.theta0, p.theta1}) found = found || std::abs(detail::wrap_near(t, cut) - cut) < 1e-12;
    EXPECT_TRUE(found) << cut;
    // Just off the cut the edge point lies inside the circle on one side and outside on the other.
    const auto edge_point = [&](double th) { return Point2(0.3 * std::cos(th) / -std::sin(th), -0.3); };
    const double r_minus = edge_point(cut - 1e-3).norm(), r_plus = edge_point(cut + 1e-3).norm();
    EXPECT_LT((r_minus - R) * (r_plus - R), 0.0);
  }
}

TEST(Cover, InsidePiecesLieWithinCircle) {
  SectionPolygon<double> quad;
  quad.vertices = {Point2(-0.2, -0.5), Point2(0.7, -0.4), Point2(0.5, 0.6), Point2(-0.4, 0.3)};
  const double R = 0.35;
  const auto pieces = cover_polygon(quad, R);
  EXPECT_NEAR(area_sum(pieces), quad.area(), 1e-12 * quad.area());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  for (const auto& p : pieces) {
    for (int k = 0; k < 200; ++k) {
      const double th = p.theta0 + (p.theta1 - p.theta0) * u(rng);
      const double lo = p.inner(th), hi = p.outer(th);
      const Point2 x = p.center + (lo + (hi - lo) * u(rng)) * Point2(std::cos(th), std::sin(th));
      if (p.region == Region::inside) {
        EXPECT_LE(x.norm(), R * (1 + 1e-12));
        ++checked;
      } else {
        EXPECT_GE(x.norm(), R * (1 - 1e-12));
      }
    }
  }
  EXPECT_GE(checked, 1000);
}

TEST(Cover, CenterOutsidePolygon) {
  SectionPolygon<double> tri;
  tri.vertices = {Point2(0.2, 0.1), Point2(1.0, 0.2), Point2(0.4, 0.9)};
  for (double R : {0.05, 0.3, 0.6, 2.0}) {
    const auto pieces = cover_polygon(tri, R);
    EXPECT_NEAR(area_sum(pieces), tri.area(), 1e-12 * tri.area()) << R;
  }
}

TEST(Cover, RejectsNonConvexPolygon) {
  SectionPolygon<double> poly;
  poly.vertices = {Point2(0, 0), Point2(1, 0), Point2(0.2, 0.2), Point2(0, 1)};
  EXPECT_THROW(cover_polygon(poly, 0.1), std::invalid_argument);
}
