#include "xfem3d1d/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace xfem3d1d;

namespace {

const Segment<double> kZAxis{Point3(0, 0, -1), Point3(0, 0, 1)};

double total_volume(const TetMesh& m) {
  double v = 0;
  for (int e = 0; e < m.num_tets(); ++e) v += m.volume(e);
  return v;
}

// Interior faces shared by two tets, boundary faces by one.
void check_conformity(const TetMesh& m) {
  std::map<std::array<int, 3>, int> count;
  for (const auto& t : m.tets)
    for (int skip = 0; skip < 4; ++skip) {
      std::array<int, 3> f{};
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) f[k++] = t[i];
      std::sort(f.begin(), f.end());
      ++count[f];
    }
  std::set<std::array<int, 3>> boundary;
  for (const auto& bf : m.boundary_faces) {
    auto f = bf.nodes;
    std::sort(f.begin(), f.end());
    boundary.insert(f);
  }
  for (const auto& [f, c] : count) {
    if (boundary.count(f))
      EXPECT_EQ(c, 1);
    else
      EXPECT_EQ(c, 2);
  }
  EXPECT_EQ(boundary.size(), m.boundary_faces.size());
}

// Minimum distance to the axis over a barycentric lattice that contains the
// vertices and edge points of the tet.
double sampled_distance(const std::array<Point3, 4>& t, const Segment<double>& lam, int m) {
  double best = 1e300;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; i + j <= m; ++j)
      for (int k = 0; i + j + k <= m; ++k) {
        const double a = double(i) / m, b = double(j) / m, c = double(k) / m;
        const Point3 x = (1 - a - b - c) * t[0] + a * t[1] + b * t[2] + c * t[3];
        best = std::min(best, distance_and_projection(x, lam).distance);
      }
  return best;
}

}  // namespace

TEST(StructuredMesh, SingleCube) {
  const TetMesh m = structured_cube_mesh(2.0, 1);
  EXPECT_EQ(m.num_vertices(), 8);
  EXPECT_EQ(m.num_tets(), 6);
  EXPECT_NEAR(total_volume(m), 8.0, 1e-12);
}

TEST(StructuredMesh, Counts) {
  const TetMesh m = structured_cube_mesh(2.0, 4);
  EXPECT_EQ(m.num_tets(), 384);
  EXPECT_NEAR(total_volume(m), 8.0, 1e-12);
  int perp = 0;
  for (const auto& f : m.boundary_faces) {
    if (f.tag != BoundaryTag::perp) continue;
    ++perp;
    for (int v : f.nodes) EXPECT_NEAR(std::abs(m.vertices[v].z()), 1.0, 1e-15);
  }
  EXPECT_EQ(perp, 2 * 2 * 16);
  for (int e = 0; e < m.num_tets(); ++e) EXPECT_GT(m.volume(e), 0.0);
}

TEST(StructuredMesh, Conformity) {
  check_conformity(structured_cube_mesh(2.0, 3));
  check_conformity(graded_cube_mesh(2.0, 4, 2.0, kZAxis));
}

TEST(StructuredMesh, RejectsZeroDivisions) {
  EXPECT_THROW(structured_cube_mesh(2.0, 0), std::invalid_argument);
}

TEST(GradedMesh, IdentityGrading) {
  const TetMesh a = structured_cube_mesh(2.0, 4);
  const TetMesh b = graded_cube_mesh(2.0, 4, 1.0, kZAxis);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  for (int v = 0; v < a.num_vertices(); ++v) EXPECT_NEAR((a.vertices[v] - b.vertices[v]).norm(), 0.0, 1e-15);
  EXPECT_EQ(a.tets, b.tets);
}

TEST(GradedMesh, ClustersTowardsAxis) {
  const TetMesh m = graded_cube_mesh(2.0, 8, 2.0, kZAxis);
  double smallest = 1e300;
  for (const auto& v : m.vertices)
    if (std::abs(v.x()) > 0) smallest = std::min(smallest, std::abs(v.x()));
  EXPECT_LT(smallest, 2.0 / 8);
}

TEST(GradedMesh, NearestOffAxisNode) {
  // Nearest off-axis coordinate is (edge/2)·(2/n)^γ by direct evaluation of the map.
  const int n = 16;
  const TetMesh m = graded_cube_mesh(2.0, n, 2.0, kZAxis);
  double nearest = 1e300;
  for (const auto& v : m.vertices) {
    const double d = std::hypot(v.x(), v.y());
    if (d > 0) nearest = std::min(nearest, d);
  }
  EXPECT_NEAR(nearest, std::pow(2.0 / n, 2.0), 1e-15);
}

TEST(GradedMesh, SpacingShrinksWithGrading) {
  double prev = 1e300;
  for (double g : {1.0, 1.5, 2.0, 3.0}) {
    const TetMesh m = graded_cube_mesh(2.0, 8, g, kZAxis);
    double smallest = 1e300;
    for (const auto& v : m.vertices)
      if (std::abs(v.x()) > 0) smallest = std::min(smallest, std::abs(v.x()));
    EXPECT_LT(smallest, prev);
    prev = smallest;
    EXPECT_NEAR(total_volume(m), 8.0, 1e-12 * 8.0);
  }
}

TEST(GradedMesh, RejectsOffAxis) {
  const Segment<double> off(Point3(0.2, 0, -1), Point3(0.2, 0, 1));
  EXPECT_THROW(graded_cube_mesh(2.0, 4, 2.0, off), std::invalid_argument);
}

TEST(Enrichment, SaturatesForLargeRho) {
  const TetMesh m = structured_cube_mesh(2.0, 3);
  const auto spec = classify_enrichment(m, kZAxis, 0.01, 10.0);
  EXPECT_EQ(static_cast<int>(spec.T_delta.size()), m.num_tets());
  EXPECT_EQ(static_cast<int>(spec.J.size()), m.num_vertices());
}

TEST(Enrichment, EmptyWhenLineMissesMesh) {
  const TetMesh m = structured_cube_mesh(2.0, 3);
  const Segment<double> far(Point3(5, 5, -1), Point3(5, 5, 1));
  const auto spec = classify_enrichment(m, far, 0.01, 0.5);
  EXPECT_TRUE(spec.T_delta.empty());
  EXPECT_TRUE(spec.J.empty());
  EXPECT_FALSE(spec.enabled());
}

TEST(Enrichment, TouchingTetsMatchSamplingOracle) {
  const TetMesh m = structured_cube_mesh(2.0, 4);
  const auto spec = classify_enrichment(m, kZAxis, 0.01, 0.01);
  std::vector<int> oracle;
  // 9880 lattice points per tet.
  for (int e = 0; e < m.num_tets(); ++e)
    if (sampled_distance(m.tet_points(e), kZAxis, 37) <= 0.01) oracle.push_back(e);
  EXPECT_EQ(spec.T_delta, oracle);
  EXPECT_FALSE(oracle.empty());
}

TEST(Enrichment, JContainsTDeltaVerticesAndOneRing) {
  const TetMesh m = structured_cube_mesh(2.0, 6);
  const auto spec = classify_enrichment(m, kZAxis, 0.01, 0.2);
  std::set<int> J(spec.J.begin(), spec.J.end());
  for (int e : spec.T_delta)
    for (int v : m.tets[e]) EXPECT_TRUE(J.count(v));
  // Every enriched support meets a T_Δ tet.
  const auto adj = vertex_tets(m);
  for (int k : spec.J) {
    bool meets = false;
    for (int e : adj[k])
      for (int w : m.tets[e])
        for (int f : adj[w]) meets = meets || spec.in_T_delta[f];
    EXPECT_TRUE(meets);
  }
  const auto core = classify_enrichment(m, kZAxis, 0.01, 0.2, 0);
  std::set<int> tverts;
  for (int e : core.T_delta)
    for (int v : m.tets[e]) tverts.insert(v);
  EXPECT_EQ(std::set<int>(core.J.begin(), core.J.end()), tverts);
  EXPECT_GT(spec.J.size(), core.J.size());
}

TEST(Enrichment, RampSetFollowsBlending) {
  const TetMesh m = structured_cube_mesh(2.0, 6);
  const auto shifted = classify_enrichment(m, kZAxis, 0.01, 0.2, 1, Blending::shifted);
  const auto corrected = classify_enrichment(m, kZAxis, 0.01, 0.2, 1, Blending::corrected);
  EXPECT_EQ(shifted.J, corrected.J);
  std::set<int> tverts;
  for (int e : corrected.T_delta)
    for (int v : m.tets[e]) tverts.insert(v);
  for (int v = 0; v < m.num_vertices(); ++v) {
    EXPECT_EQ(shifted.in_ramp[v] != 0, shifted.is_enriched(v));
    EXPECT_EQ(corrected.in_ramp[v] != 0, tverts.count(v) == 1);
  }
}

TEST(Enrichment, MonotoneInRho) {
  const TetMesh m = structured_cube_mesh(2.0, 6);
  const auto a = classify_enrichment(m, kZAxis, 0.01, 0.1);
  const auto b = classify_enrichment(m, kZAxis, 0.01, 0.3);
  EXPECT_TRUE(std::includes(b.T_delta.begin(), b.T_delta.end(), a.T_delta.begin(), a.T_delta.end()));
  EXPECT_TRUE(std::includes(b.J.begin(), b.J.end(), a.J.begin(), a.J.end()));
}

TEST(Enrichment, RejectsRhoBelowR) {
  const TetMesh m = structured_cube_mesh(2.0, 2);
  EXPECT_THROW(classify_enrichment(m, kZAxis, 0.1, 0.05), std::invalid_argument);
}

TEST(Mesh1D, DofCounts) {
  EXPECT_EQ(uniform_mesh_1d(2.0, 16, Basis1D::p0).num_dofs(), 16);
  EXPECT_EQ(uniform_mesh_1d(2.0, 16, Basis1D::p1).num_dofs(), 17);
  EXPECT_EQ(uniform_mesh_1d(2.0, 30, Basis1D::p1).num_dofs(), 31);
  const auto m = uniform_mesh_1d(2.0, 7, Basis1D::p1);
  for (int i = 1; i < static_cast<int>(m.nodes.size()); ++i) EXPECT_GT(m.nodes[i], m.nodes[i - 1]);
  EXPECT_EQ(m.nodes.front(), 0.0);
  EXPECT_EQ(m.nodes.back(), 2.0);
  EXPECT_THROW(uniform_mesh_1d(2.0, 0, Basis1D::p1), std::invalid_argument);
}

TEST(DofMap, DirichletFacesAndEnrichedDofs) {
  const TetMesh m = structured_cube_mesh(2.0, 4);
  const auto spec = classify_enrichment(m, kZAxis, 0.01, 0.3);
  const std::vector<BoundaryTag> tags{BoundaryTag::perp};
  const DofMap map = make_dof_map(m, spec, tags);
  EXPECT_EQ(map.size(), m.num_vertices() + static_cast<int>(spec.J.size()));
  EXPECT_EQ(static_cast<int>(map.dirichlet_nodes.size()), 2 * 25);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const bool on_face = std::abs(std::abs(m.vertices[v].z()) - 1.0) < 1e-15;
    EXPECT_EQ(map.constrained[v] != 0, on_face);
    if (spec.is_enriched(v)) EXPECT_EQ(map.constrained[map.enriched_dof[v]] != 0, on_face);
  }
}

TEST(PointLocator, FindsContainingTet) {
  const TetMesh m = graded_cube_mesh(2.0, 6, 2.0, kZAxis);
  const PointLocator loc(m);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) {
    const Point3 x(u(rng), u(rng), u(rng));
    const auto hit = loc.locate(x);
    ASSERT_TRUE(hit.has_value());
    EXPECT_GE(hit->barycentric.minCoeff(), -1e-10);
    const Eigen::Vector4d b = TetGeometry(m.tet_points(hit->tet)).barycentric(x);
    EXPECT_NEAR((b - hit->barycentric).norm(), 0.0, 1e-12);
  }
  EXPECT_FALSE(loc.locate(Point3(1.5, 0, 0)).has_value());
}
