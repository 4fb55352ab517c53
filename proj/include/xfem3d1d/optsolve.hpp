#pragma once

#include "xfem3d1d/assembly.hpp"

#include <array>
#include <string>

namespace xfem3d1d {

/// J = ½[(GU − PΨ)ᵀW(GU − PΨ) + (QÛ − PΨ)ᵀW(QÛ − PΨ)] with U the full 3D
/// coefficient vector (standard then enriched).
double functional_J(const Eigen::VectorXd& U, const Eigen::VectorXd& Uhat, const Eigen::VectorXd& Psi,
                    const SparseMatrix& G, const SparseMatrix& Q, const SparseMatrix& P, const Eigen::VectorXd& w);

/// Blocks restricted to free DOFs. Prescribed 3D and 1D values enter through
/// f, g and the trace offsets o_U = G_c u_c, o_Uhat = Q_c û_c.
struct ReducedBlocks {
  SparseMatrix A, Ahat, B, Bhat, C, Chat;
  Eigen::VectorXd f, g;
  SparseMatrix G, Q, P;
  Eigen::VectorXd w, o_U, o_Uhat;
  Constraint c3d, c1d;
  int n_standard = 0;  // standard part of the full 3D vector

  int n_U() const { return static_cast<int>(A.cols()); }
  int n_Uhat() const { return static_cast<int>(Ahat.cols()); }
  int n_Phi() const { return static_cast<int>(B.cols()); }
  int n_Psi() const { return static_cast<int>(C.cols()); }
};

ReducedBlocks reduce_blocks(const BlockSystem& blocks, const Constraint& c3d, const Constraint& c1d);

/// Saddle-point system over [U; Û; Φ; Ψ; p; p̂] (free DOFs only).
struct KKTSystem {
  SparseMatrix K;
  Eigen::VectorXd rhs;
  std::array<int, 6> sizes{};    // U, Û, Φ, Ψ, p, p̂
  std::array<int, 7> offsets{};  // prefix sums of sizes

  Eigen::Index size() const { return K.rows(); }
  Eigen::VectorXd block(const Eigen::VectorXd& x, int i) const { return x.segment(offsets[i], sizes[i]); }
};

KKTSystem build_kkt(const ReducedBlocks& rb);

struct SolveReport {
  std::string strategy;
  double kkt_residual = 0.0;   // relative, full system (full-KKT strategy only)
  double residual_var1 = 0.0;  // ‖AU − BΦ − CΨ − f‖ / ‖f‖ (or absolute if f = 0)
  double residual_var2 = 0.0;
  double J = 0.0;
  int refinements = 0;
  double backward_error = 0.0;
  int n_U = 0, n_Uhat = 0, n_Phi = 0, n_Psi = 0, n_multipliers = 0;
  double wall_seconds = 0.0;
};

struct SparseSolveOptions {
  double refine_tol = 1e-10;
  int max_refinements = 3;
  double max_condition = 1e14;
};

struct LinearSolve {
  Eigen::VectorXd x;
  int refinements = 0;
  double backward_error = 0.0;
  double condition_estimate = 0.0;
};

/// Sparse LU with iterative refinement. Throws std::runtime_error when the
/// factorization fails or the matrix is numerically singular.
LinearSolve solve_sparse(const SparseMatrix& K, const Eigen::VectorXd& b, const SparseSolveOptions& opts = {});

/// LDLᵀ for SPD systems; throws on breakdown or a non-positive pivot.
Eigen::VectorXd solve_spd(const SparseMatrix& A, const Eigen::VectorXd& b);

/// 3D-only problem (K∇u, ∇v) + α(|Γ|ǔ, v̌) = (f, v) + ⟨|Γ|φ, v̌⟩ with φ
/// prescribed and Dirichlet data on the tagged faces.
struct ForwardProblem {
  double K = 1.0;
  double alpha = 0.0;
  ScalarField f;
  LineField phi;
  ScalarField dirichlet;  // null: homogeneous
  std::vector<BoundaryTag> dirichlet_tags{BoundaryTag::parallel};
  Mesh1D line_mesh;  // breakpoints of the Λ quadrature
  int line_points = 3;
  int n_circle = 16;
};

SolutionFields solve_forward_3d(const XfemSpace& space, const PointLocator& locator, const ForwardProblem& problem,
                                const AssemblyOptions& opts = {}, SolveReport* report = nullptr);

enum class Strategy { full_kkt, reduced };

struct CoupledProblem {
  double K = 1.0;
  double Ktilde = 1e5;
  double alpha = 1.0;
  double alpha_hat = 1.0;
  ScalarField f;
  LineField gbar;
  ScalarField dirichlet;  // 3D data on the tagged faces; null: homogeneous
  std::vector<BoundaryTag> dirichlet_tags{BoundaryTag::perp};
  bool uhat_dirichlet = true;  // prescribe Û at both endpoints
  double uhat_left = 0.0, uhat_right = 0.0;
  Mesh1D mesh_uhat, mesh_psi, mesh_phi;
  int line_points = 3;
  int n_circle = 16;
  Strategy strategy = Strategy::full_kkt;
};

struct CoupledSolution {
  SolutionFields fields;
  SolveReport report;
  Eigen::VectorXd p, p_hat;  // multipliers on free DOFs (full-KKT strategy only)
};

/// Assembled, BC-reduced blocks for a coupled problem.
ReducedBlocks assemble_coupled(const XfemSpace& space, const PointLocator& locator, const CoupledProblem& problem,
                               const AssemblyOptions& opts = {});

CoupledSolution solve_reduced_blocks(const ReducedBlocks& rb, Strategy strategy);

CoupledSolution solve_coupled(const XfemSpace& space, const PointLocator& locator, const CoupledProblem& problem,
                              const AssemblyOptions& opts = {});

}  // namespace xfem3d1d
