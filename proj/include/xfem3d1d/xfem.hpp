#pragma once

#include "xfem3d1d/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace xfem3d1d {

/// Log-plateau enrichment: −log(d) for d > R, −log(R) otherwise.
double zeta(double d, double R);

/// ∇ζ(d_Λ(x)): zero on the plateau, −(x − proj_Λ x)/d² outside it. At d = R
/// the outside branch is returned.
Eigen::Vector3d zeta_gradient(const Point3& x, const Segment<double>& lam, double R);

struct RampEval {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

struct TetBasis {
  Eigen::Vector4d phi;
  Eigen::Matrix<double, 4, 3> grad;
};

/// Ramp r = Σ φ_k over the ramp vertices (all of J, or the T_Δ vertices for
/// the corrected form) restricted to one element.
RampEval ramp(const TetBasis& basis, const std::array<int, 4>& tet, const EnrichmentSpec& spec);

struct EnrichedValue {
  int local = 0;  // local vertex 0..3
  int vertex = 0; // global vertex id (k ∈ J)
  double value = 0.0;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
};

/// Standard P1 values/gradients plus the enriched functions of the element's
/// enriched vertices, in the form selected by EnrichmentSpec::blending.
struct BasisEval {
  int element = -1;
  Point3 point = Point3::Zero();
  std::array<double, 4> phi{};
  std::array<Eigen::Vector3d, 4> grad{};
  std::array<EnrichedValue, 4> enriched{};
  int n_enriched = 0;
};

struct SolutionFields {
  Eigen::VectorXd U;     // standard coefficients, one per mesh vertex
  Eigen::VectorXd W;     // enriched coefficients, in J order
  Eigen::VectorXd Uhat;  // 1D P1 coefficients
  Eigen::VectorXd Phi;   // P0 coefficients
  Eigen::VectorXd Psi;   // P1 coefficients
};

/// Standard plus enriched P1 space on a tetrahedral mesh. Global DOF ids are
/// vertex ids for the standard part and N + position in J for enriched DOFs.
class XfemSpace {
 public:
  XfemSpace(const TetMesh& mesh, EnrichmentSpec spec);

  const TetMesh& mesh() const { return *mesh_; }
  const EnrichmentSpec& spec() const { return spec_; }
  const TetGeometry& geometry(int e) const { return geo_[e]; }

  int n_standard() const { return mesh_->num_vertices(); }
  int n_enriched() const { return static_cast<int>(spec_.J.size()); }
  int num_dofs() const { return n_standard() + n_enriched(); }
  int enriched_dof(int vertex) const { return n_standard() + spec_.enriched_index[vertex]; }
  bool element_enriched(int e) const { return enriched_element_[e] != 0; }

  /// Throws when x lies outside the element beyond the barycentric tolerance.
  BasisEval eval_basis(int e, const Point3& x, double tol = 1e-10) const;
  BasisEval eval_basis_unchecked(int e, const Point3& x) const;

  /// Global DOF id of each basis function of an evaluation, in the order
  /// standard (4) then enriched.
  int dofs(const BasisEval& b, std::array<int, 8>& out) const;

  double eval_field(const SolutionFields& fields, const BasisEval& b) const;
  Eigen::Vector3d eval_gradient(const SolutionFields& fields, const BasisEval& b) const;

  /// Field value at an arbitrary point of the mesh; throws on location failure.
  double eval_field(const SolutionFields& fields, const PointLocator& locator, const Point3& x) const;

 private:
  const TetMesh* mesh_;
  EnrichmentSpec spec_;
  std::vector<TetGeometry> geo_;
  std::vector<double> shift_;  // ζ(x_k) per enriched vertex
  std::vector<char> enriched_element_;
};

}  // namespace xfem3d1d
