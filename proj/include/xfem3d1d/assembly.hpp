#pragma once

#include "xfem3d1d/quadrature.hpp"
#include "xfem3d1d/xfem.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <span>
#include <vector>

namespace xfem3d1d {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using ScalarField = std::function<double(const Point3&)>;
using LineField = std::function<double(double)>;

struct AssemblyOptions {
  QuadParams quad;
  int standard_order = 2;
  int threads = 1;
};

/// Quadrature rule used on element e: the enriched rule around Λ on elements
/// with an enriched vertex, the standard rule of the given order elsewhere.
Rule3D<double> element_rule(const XfemSpace& space, int e, const QuadParams& quad, int standard_order);

/// (K∇u, ∇v) over standard and enriched DOFs.
SparseMatrix assemble_stiffness_3d(const XfemSpace& space, double K, const AssemblyOptions& opts = {});

/// (f, v); a null f gives the zero vector.
Eigen::VectorXd assemble_load_3d(const XfemSpace& space, const ScalarField& f, const AssemblyOptions& opts = {});

/// Composite Gauss points on Λ: `points` nodes on every interval of the
/// union partition of the given breakpoint sets.
struct LineQuadrature {
  std::vector<double> s;
  Eigen::VectorXd w;
  int size() const { return static_cast<int>(s.size()); }
};

LineQuadrature line_quadrature(std::span<const Mesh1D> meshes, int points = 3);

/// Circle averages ū(s_q) = (1/|Γ(s_q)|)∫_{Γ(s_q)} U dl at the line
/// quadrature abscissas, as a sparse map G from 3D DOFs.
struct TraceOperator {
  LineQuadrature quad;
  int n_circle = 16;
  SparseMatrix G;  // quad.size() × space.num_dofs()
};

TraceOperator assemble_trace_matrix(const XfemSpace& space, const PointLocator& locator, LineQuadrature quad,
                                    int n_circle = 16);

/// Values (derivative = false) or derivatives of the 1D basis at abscissas.
SparseMatrix evaluation_matrix(const Mesh1D& mesh, std::span<const double> s, bool derivative = false);

struct OneDBlocks {
  SparseMatrix stiffness;  // P1 (dû/ds, dv̂/ds)
  SparseMatrix mass;       // P1 (û, v̂)
  SparseMatrix Ahat;       // K̃πR² stiffness + α̂ 2πR mass
};

OneDBlocks assemble_1d(const Mesh1D& mesh_u, double Ktilde, double R, double alpha_hat);

/// All blocks of the discrete constraints and functional, before boundary
/// conditions. |Γ| = 2πR and |Σ| = πR².
struct BlockSystem {
  SparseMatrix A;        // 3D stiffness + α|Γ| GᵀWG
  SparseMatrix Ahat;     // K̃|Σ| stiffness + α̂|Γ| mass
  SparseMatrix B;        // |Γ| GᵀW Pφ      (3D × Φ)
  SparseMatrix Bhat;     // |Γ| QᵀW Pφ      (Û × Φ)
  SparseMatrix Cpsi;     // α|Γ| GᵀW Pψ     (3D × Ψ)
  SparseMatrix Cpsihat;  // α̂|Γ| QᵀW Pψ     (Û × Ψ)
  Eigen::VectorXd f_D, g_Lambda;
  double alpha = 1.0, alpha_hat = 1.0;

  // Functional J evaluated at the trace abscissas.
  SparseMatrix G, Q, P;  // traces of U, values of Û and Ψ
  Eigen::VectorXd w;     // line quadrature weights
};

struct CouplingBlocks {
  SparseMatrix B, Bhat, Cpsi, Cpsihat, trace_mass;
  SparseMatrix Q, Pphi, Ppsi;
};

/// Λ-line couplings: ⟨|Γ|Φ, v̌⟩, ⟨|Γ|Φ, v̂⟩, α(|Γ|Ψ, v̌), α̂(|Γ|Ψ, v̂) and α(|Γ|ǔ, v̌).
CouplingBlocks assemble_coupling(const TraceOperator& trace, const Mesh1D& mesh_phi, const Mesh1D& mesh_u1d,
                                 const Mesh1D& mesh_psi, double R, double alpha, double alpha_hat);

struct RhsBlocks {
  Eigen::VectorXd f_D, g_Lambda;
};

/// (f, v)_D and (|Σ| ḡ̄, v̂)_Λ with ḡ̄ the given section average.
RhsBlocks assemble_rhs(const XfemSpace& space, const ScalarField& f, const Mesh1D& mesh_u1d,
                       const LineQuadrature& quad, const LineField& gbar, double R, const AssemblyOptions& opts = {});

// ---------------------------------------------------------------------------
// Boundary conditions

/// Split of a DOF range into free and prescribed DOFs.
struct Constraint {
  int full_size = 0;
  std::vector<int> free;
  std::vector<int> fixed;
  Eigen::VectorXd fixed_values;

  static Constraint from_mask(std::span<const char> constrained, const Eigen::VectorXd& values);
  Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
};

struct ReducedSystem {
  SparseMatrix A;  // free × free
  Eigen::VectorXd b;
  Constraint constraint;
};

/// Strong elimination: A_ff x_f = b_f − A_fc x_c.
ReducedSystem apply_dirichlet(const SparseMatrix& A, const Eigen::VectorXd& b, const Constraint& c);

SparseMatrix select_rows(const SparseMatrix& A, std::span<const int> rows);
SparseMatrix select_cols(const SparseMatrix& A, std::span<const int> cols);

/// Largest |A − Aᵀ| entry relative to the largest |A| entry.
double asymmetry(const SparseMatrix& A);

}  // namespace xfem3d1d
