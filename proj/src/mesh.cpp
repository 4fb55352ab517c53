#include "xfem3d1d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace xfem3d1d {

std::array<Point3, 4> TetMesh::tet_points(int e) const {
  const auto& t = tets[e];
  return {vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]};
}

double TetMesh::volume(int e) const {
  const auto p = tet_points(e);
  return (p[1] - p[0]).cross(p[2] - p[0]).dot(p[3] - p[0]) / 6.0;
}

TetMesh tensor_box_mesh(std::span<const double> xs, std::span<const double> ys, std::span<const double> zs) {
  const std::array<std::span<const double>, 3> axes{xs, ys, zs};
  for (const auto& a : axes) {
    if (a.size() < 2) throw std::invalid_argument("tensor_box_mesh: need at least two coordinates per axis");
    for (std::size_t i = 1; i < a.size(); ++i)
      if (!(a[i] > a[i - 1])) throw std::invalid_argument("tensor_box_mesh: coordinates must increase");
  }
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size()), nz = static_cast<int>(zs.size());
  const auto id = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

  TetMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) mesh.vertices.emplace_back(xs[i], ys[j], zs[k]);

  // Kuhn split: one tet per axis permutation, walking from corner 000 to 111.
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  mesh.tets.reserve(6 * static_cast<std::size_t>(nx - 1) * (ny - 1) * (nz - 1));
  for (int k = 0; k + 1 < nz; ++k)
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = id(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[p[step]];
            t[step + 1] = id(c[0], c[1], c[2]);
          }
          const auto& v = mesh.vertices;
          if ((v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]).dot(v[t[3]] - v[t[0]]) < 0) std::swap(t[2], t[3]);
          mesh.tets.push_back(t);
        }

  // Boundary faces: all three vertices on one box plane.
  const std::array<double, 3> lo{xs.front(), ys.front(), zs.front()};
  const std::array<double, 3> hi{xs.back(), ys.back(), zs.back()};
  static constexpr std::array<std::array<int, 3>, 4> faces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};
  for (int e = 0; e < mesh.num_tets(); ++e) {
    for (const auto& f : faces) {
      const std::array<int, 3> nodes{mesh.tets[e][f[0]], mesh.tets[e][f[1]], mesh.tets[e][f[2]]};
      for (int axis = 0; axis < 3; ++axis) {
        for (double plane : {lo[axis], hi[axis]}) {
          const bool on = std::all_of(nodes.begin(), nodes.end(),
                                      [&](int n) { return mesh.vertices[n][axis] == plane; });
          if (on) mesh.boundary_faces.push_back({nodes, axis == 2 ? BoundaryTag::perp : BoundaryTag::parallel, e});
        }
      }
    }
  }
  return mesh;
}

TetMesh structured_cube_mesh(double edge, int n) {
  if (n < 1) throw std::invalid_argument("structured_cube_mesh: n must be at least 1");
  if (!(edge > 0)) throw std::invalid_argument("structured_cube_mesh: edge must be positive");
  std::vector<double> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = -edge / 2 + edge * i / n;
  c[n] = edge / 2;
  return tensor_box_mesh(c, c, c);
}

TetMesh graded_cube_mesh(double edge, int n, double grading, const Segment<double>& axis, int axial_n) {
  if (axial_n == 0) axial_n = n;
  if (n < 1 || axial_n < 1) throw std::invalid_argument("graded_cube_mesh: n must be at least 1");
  if (!(grading > 0)) throw std::invalid_argument("graded_cube_mesh: grading must be positive");
  const double tol = 1e-12 * edge;
  const bool on_z = std::abs(axis.tangent().x()) <= 1e-12 && std::abs(axis.tangent().y()) <= 1e-12 &&
                    std::abs(axis.a().x()) <= tol && std::abs(axis.a().y()) <= tol;
  if (!on_z) throw std::invalid_argument("graded_cube_mesh: axis must be the z-axis through the cube centre");
  const double half = edge / 2;
  std::vector<double> z(axial_n + 1), xy(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double xi = -half + edge * i / n;
    xy[i] = std::copysign(std::pow(std::abs(xi), grading) * std::pow(half, 1.0 - grading), xi);
  }
  for (int i = 0; i <= axial_n; ++i) z[i] = -half + edge * i / axial_n;
  z[axial_n] = xy[n] = half;
  xy[0] = -half;
  if (n % 2 == 0) xy[n / 2] = 0.0;
  if (axial_n % 2 == 0) z[axial_n / 2] = 0.0;
  return tensor_box_mesh(xy, xy, z);
}

std::vector<std::vector<int>> vertex_tets(const TetMesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.vertices.size());
  for (int e = 0; e < mesh.num_tets(); ++e)
    for (int v : mesh.tets[e]) adj[v].push_back(e);
  return adj;
}

bool EnrichmentSpec::element_enriched(const TetMesh& mesh, int e) const {
  if (J.empty()) return false;
  const auto& t = mesh.tets[e];
  return std::any_of(t.begin(), t.end(), [&](int v) { return enriched_index[v] >= 0; });
}

EnrichmentSpec no_enrichment(const TetMesh& mesh, const Segment<double>& lam, double R) {
  if (!(R > 0)) throw std::invalid_argument("no_enrichment: R must be positive");
  EnrichmentSpec spec{lam, R, R, {}, {}, std::vector<int>(mesh.vertices.size(), -1),
                      std::vector<char>(mesh.tets.size(), 0), std::vector<char>(mesh.vertices.size(), 0)};
  return spec;
}

EnrichmentSpec classify_enrichment(const TetMesh& mesh, const Segment<double>& lam, double R, double rho,
                                   int rings, Blending blending) {
  if (!(R > 0)) throw std::invalid_argument("classify_enrichment: R must be positive");
  if (rho < R) throw std::invalid_argument("classify_enrichment: rho must be at least R");
  EnrichmentSpec spec = no_enrichment(mesh, lam, R);
  spec.rho = rho;
  spec.blending = blending;
  for (int e = 0; e < mesh.num_tets(); ++e) {
    if (segment_tet_distance(lam, mesh.tet_points(e)) <= rho) {
      spec.T_delta.push_back(e);
      spec.in_T_delta[e] = 1;
    }
  }
  std::vector<char> mark(mesh.vertices.size(), 0);
  for (int e : spec.T_delta)
    for (int v : mesh.tets[e]) mark[v] = 1;
  const std::vector<char> core = mark;
  if (rings > 0) {
    const auto adj = vertex_tets(mesh);
    for (int r = 0; r < rings; ++r) {
      std::vector<char> next = mark;
      for (std::size_t v = 0; v < mark.size(); ++v) {
        if (!mark[v]) continue;
        for (int e : adj[v])
          for (int w : mesh.tets[e]) next[w] = 1;
      }
      mark.swap(next);
    }
  }
  for (std::size_t v = 0; v < mark.size(); ++v) {
    if (!mark[v]) continue;
    spec.enriched_index[v] = static_cast<int>(spec.J.size());
    spec.J.push_back(static_cast<int>(v));
  }
  spec.in_ramp = blending == Blending::corrected ? core : mark;
  return spec;
}

Mesh1D uniform_mesh_1d(double S, int m, Basis1D basis) {
  if (m < 1) throw std::invalid_argument("uniform_mesh_1d: m must be at least 1");
  if (!(S > 0)) throw std::invalid_argument("uniform_mesh_1d: S must be positive");
  Mesh1D mesh;
  mesh.basis = basis;
  mesh.nodes.resize(m + 1);
  for (int i = 0; i <= m; ++i) mesh.nodes[i] = S * i / m;
  mesh.nodes[m] = S;
  return mesh;
}

DofMap make_dof_map(const TetMesh& mesh, const EnrichmentSpec& spec, std::span<const BoundaryTag> dirichlet) {
  DofMap map;
  map.n_standard = mesh.num_vertices();
  map.n_enriched = static_cast<int>(spec.J.size());
  map.enriched_dof.assign(mesh.vertices.size(), -1);
  for (std::size_t i = 0; i < spec.J.size(); ++i) map.enriched_dof[spec.J[i]] = map.n_standard + static_cast<int>(i);
  map.constrained.assign(map.size(), 0);
  std::vector<char> on_dirichlet(mesh.vertices.size(), 0);
  for (const auto& f : mesh.boundary_faces) {
    if (std::find(dirichlet.begin(), dirichlet.end(), f.tag) == dirichlet.end()) continue;
    for (int v : f.nodes) on_dirichlet[v] = 1;
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!on_dirichlet[v]) continue;
    map.dirichlet_nodes.push_back(v);
    map.constrained[v] = 1;
    if (map.enriched_dof[v] >= 0) map.constrained[map.enriched_dof[v]] = 1;
  }
  return map;
}

TetGeometry::TetGeometry(const std::array<Point3, 4>& p) : origin(p[0]) {
  Eigen::Matrix3d J;
  J << p[1] - p[0], p[2] - p[0], p[3] - p[0];
  const double det = J.determinant();
  if (!(det > 0)) throw std::invalid_argument("TetGeometry: non-positive element volume");
  volume = det / 6.0;
  inverse_jacobian = J.inverse();
  grad.row(1) = inverse_jacobian.row(0);
  grad.row(2) = inverse_jacobian.row(1);
  grad.row(3) = inverse_jacobian.row(2);
  grad.row(0) = -(grad.row(1) + grad.row(2) + grad.row(3));
}

Eigen::Vector4d TetGeometry::barycentric(const Point3& x) const {
  const Eigen::Vector3d l = inverse_jacobian * (x - origin);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

PointLocator::PointLocator(const TetMesh& mesh) : mesh_(&mesh) {
  geo_.reserve(mesh.tets.size());
  for (int e = 0; e < mesh.num_tets(); ++e) geo_.emplace_back(mesh.tet_points(e));
  lo_ = hi_ = mesh.vertices.front();
  for (const auto& v : mesh.vertices) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  const int per_axis = std::max(1, static_cast<int>(std::cbrt(mesh.tets.size() / 4.0)));
  bins_ = {per_axis, per_axis, per_axis};
  cells_.resize(static_cast<std::size_t>(per_axis) * per_axis * per_axis);
  for (int e = 0; e < mesh.num_tets(); ++e) {
    const auto p = mesh.tet_points(e);
    Point3 a = p[0], b = p[0];
    for (const auto& q : p) {
      a = a.cwiseMin(q);
      b = b.cwiseMax(q);
    }
    const auto ba = bin_of(a), bb = bin_of(b);
    for (int k = ba[2]; k <= bb[2]; ++k)
      for (int j = ba[1]; j <= bb[1]; ++j)
        for (int i = ba[0]; i <= bb[0]; ++i) cells_[i + bins_[0] * (j + bins_[1] * k)].push_back(e);
  }
}

std::array<int, 3> PointLocator::bin_of(const Point3& x) const {
  std::array<int, 3> b{};
  for (int d = 0; d < 3; ++d) {
    const double t = (x[d] - lo_[d]) / (hi_[d] - lo_[d]);
    b[d] = std::clamp(static_cast<int>(std::floor(t * bins_[d])), 0, bins_[d] - 1);
  }
  return b;
}

std::optional<PointLocator::Hit> PointLocator::locate(const Point3& x, double tol) const {
  const auto b = bin_of(x);
  std::optional<Hit> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int e : cells_[b[0] + bins_[0] * (b[1] + bins_[1] * b[2])]) {
    const Eigen::Vector4d l = geo_[e].barycentric(x);
    const double m = l.minCoeff();
    if (m > best_min) {
      best_min = m;
      best = Hit{e, l};
    }
  }
  if (!best || best_min < -tol) return std::nullopt;
  return best;
}

}  // namespace xfem3d1d
