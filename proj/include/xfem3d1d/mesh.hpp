#pragma once

#include "xfem3d1d/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace xfem3d1d {

/// Box faces orthogonal to the z-axis are `perp`, all others `parallel`.
enum class BoundaryTag { parallel, perp };

struct BoundaryFace {
  std::array<int, 3> nodes;
  BoundaryTag tag;
  int tet;
};

struct TetMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryFace> boundary_faces;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_tets() const { return static_cast<int>(tets.size()); }
  std::array<Point3, 4> tet_points(int e) const;
  double volume(int e) const;
};

/// Tensor-product box mesh, each cell split into six Kuhn tetrahedra sharing
/// the cell diagonal. Coordinates must be strictly increasing.
TetMesh tensor_box_mesh(std::span<const double> xs, std::span<const double> ys, std::span<const double> zs);

/// Uniform mesh of the cube of the given edge centred at the origin.
TetMesh structured_cube_mesh(double edge, int n);

/// Cube mesh with x and y node coordinates mapped by ξ ↦ sign(ξ)|ξ|^γ (edge/2)^{1−γ},
/// clustering nodes towards the axis; z stays uniform with `axial_n`
/// divisions (0: n). The axis must be the z-axis through the cube centre.
TetMesh graded_cube_mesh(double edge, int n, double grading, const Segment<double>& axis, int axial_n = 0);

/// Ids of the tets incident to each vertex.
std::vector<std::vector<int>> vertex_tets(const TetMesh& mesh);

/// Form of the enriched functions for k ∈ J.
///  shifted:   φ_k (ζ r − ζ(x_k) r(x_k)), ramp r over all of J.
///  corrected: φ_k r (ζ − ζ(x_k)), ramp r over the vertices of T_Δ only.
/// Both coincide on T_Δ and vanish at every node. In blending tets the
/// corrected form leaves (1 − r)(ζ − I ζ) as the error of the enriched
/// interpolant instead of ζ r − I(ζ r).
enum class Blending { shifted, corrected };

/// Enrichment geometry: T_Δ = {τ : dist(τ, Λ) ≤ ρ}; J = vertices of all tets
/// touching T_Δ (closed supports of φ_k meeting a T_Δ tet).
struct EnrichmentSpec {
  Segment<double> lam;
  double R;
  double rho;
  std::vector<int> T_delta;         // sorted tet ids
  std::vector<int> J;               // sorted vertex ids
  std::vector<int> enriched_index;  // per vertex: position in J, or -1
  std::vector<char> in_T_delta;     // per tet
  std::vector<char> in_ramp;        // per vertex
  Blending blending = Blending::shifted;

  bool enabled() const { return !J.empty(); }
  bool is_enriched(int vertex) const { return enriched_index[vertex] >= 0; }
  /// Tets with at least one enriched vertex (T_Δ plus blending elements).
  bool element_enriched(const TetMesh& mesh, int e) const;
};

/// `rings` = 1 follows the closed-support definition of J; 0 restricts J to
/// the vertices of T_Δ.
EnrichmentSpec classify_enrichment(const TetMesh& mesh, const Segment<double>& lam, double R, double rho,
                                   int rings = 1, Blending blending = Blending::corrected);

/// Empty enrichment (standard FEM) carrying the inclusion geometry.
EnrichmentSpec no_enrichment(const TetMesh& mesh, const Segment<double>& lam, double R);

enum class Basis1D { p1, p0 };

struct Mesh1D {
  std::vector<double> nodes;
  Basis1D basis = Basis1D::p1;

  int num_elements() const { return static_cast<int>(nodes.size()) - 1; }
  int num_dofs() const { return basis == Basis1D::p1 ? num_elements() + 1 : num_elements(); }
  double length() const { return nodes.back() - nodes.front(); }
};

Mesh1D uniform_mesh_1d(double S, int m, Basis1D basis);

/// Standard DOFs 0..N−1 (vertex ids), enriched DOFs N..N+|J|−1 (in J order).
struct DofMap {
  int n_standard = 0;
  int n_enriched = 0;
  std::vector<int> enriched_dof;     // per vertex: global id or -1
  std::vector<int> dirichlet_nodes;  // sorted vertex ids on Dirichlet faces
  std::vector<char> constrained;     // per global dof

  int size() const { return n_standard + n_enriched; }
};

/// Standard DOFs on faces with a Dirichlet tag are constrained; so are the
/// enriched DOFs of those vertices, whose shifted basis is non-zero on the face.
DofMap make_dof_map(const TetMesh& mesh, const EnrichmentSpec& spec, std::span<const BoundaryTag> dirichlet);

/// Affine data of one tetrahedron: barycentric coordinates and their gradients.
struct TetGeometry {
  Point3 origin;
  Eigen::Matrix3d inverse_jacobian;  // maps x − origin to (λ1, λ2, λ3)
  Eigen::Matrix<double, 4, 3> grad;  // row i: ∇λ_i
  double volume = 0.0;

  explicit TetGeometry(const std::array<Point3, 4>& p);
  Eigen::Vector4d barycentric(const Point3& x) const;
};

/// Uniform-bin point location over a tetrahedral mesh.
class PointLocator {
 public:
  explicit PointLocator(const TetMesh& mesh);

  struct Hit {
    int tet;
    Eigen::Vector4d barycentric;
  };

  /// Tet containing x (largest minimum barycentric among candidates), or
  /// nullopt when x lies outside the mesh by more than `tol` (barycentric).
  std::optional<Hit> locate(const Point3& x, double tol = 1e-10) const;

 private:
  const TetMesh* mesh_;
  std::vector<TetGeometry> geo_;
  Eigen::Vector3d lo_, hi_;
  std::array<int, 3> bins_{};
  std::vector<std::vector<int>> cells_;

  std::array<int, 3> bin_of(const Point3& x) const;
};

}  // namespace xfem3d1d
