#pragma once

#include "xfem3d1d/config.hpp"
#include "xfem3d1d/optsolve.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace xfem3d1d {

struct ExperimentConfig {
  std::string experiment;  // quad_table | test1 | test2
  std::filesystem::path output_dir;
  int threads = 1;

  double K = 1.0;
  QuadParams quad;
  int standard_order = 2;
  int n_circle = 16;
  int line_points = 3;
  int enrichment_rings = 1;

  // quad_table
  std::vector<double> table_radii{0.1, 0.3};
  std::vector<std::array<int, 3>> table_triples{{1, 4, 9}, {1, 6, 9}, {1, 8, 12}};
  double oracle_tol = 1e-16;

  // test1
  std::vector<int> divisions{4, 8, 12, 16};
  double R = 1e-3;
  std::vector<double> rho{1e-3, 0.05, 0.1, 0.2, 0.3};
  double alpha = 0.0;
  int error_order = 4;
  double error_near = 0.25;  // tets closer than max(ρ, this) to Λ use the polar rule in error norms

  // test2
  double Ktilde = 1e5;
  double alpha_hat = 1.0;
  double source = 1.0;
  double gbar = 0.0;
  int coarse_divisions = 8;
  int adapted_divisions = 112;
  int adapted_axial_divisions = 8;  // 0: adapted_divisions
  double grading = 3.0;
  int uhat_dofs = 31, psi_dofs = 17, phi_dofs = 16;
  int adapted_uhat_dofs = 400, adapted_psi_dofs = 201, adapted_phi_dofs = 200;
  int profile_points = 201;
  Strategy coarse_strategy = Strategy::full_kkt;
  Strategy adapted_strategy = Strategy::reduced;
  bool write_vtk = true;

  /// Defaults are the reference runs of the given experiment; every field
  /// can be overridden by a key of the same name. Unknown keys are rejected.
  static ExperimentConfig from(const Config& config, const std::string& experiment);
  void validate() const;
};

// ---------------------------------------------------------------------------
// Error norms

struct ErrorNorms {
  double l2 = 0.0, h1 = 0.0;          // relative
  double l2_abs = 0.0, h1_abs = 0.0;  // absolute (full H¹ norm)
  double norm_l2 = 0.0, norm_h1 = 0.0;
};

using GradientField = std::function<Eigen::Vector3d(const Point3&)>;

/// Relative L² and H¹ errors of the XFEM field, integrated element by element:
/// polar rule on tets within `near` of Λ or with enriched vertices, standard
/// rule of the given order elsewhere. Throws when the exact norm vanishes.
ErrorNorms error_norms(const XfemSpace& space, const SolutionFields& fields, const ScalarField& u_exact,
                       const GradientField& grad_exact, const QuadParams& quad, double near, int order = 4);

// ---------------------------------------------------------------------------
// Table 1
//
// Commands write their CSV (and VTK) files to cfg.output_dir when it is set
// and echo progress to `log` when given.

/// Exact ∫ ζ over the unit cube with Λ on the edge x = y = 0.
double table1_exact(double R);

/// Same integral by nested adaptive Gauss–Kronrod in extended precision.
double table1_adaptive(double R, double rel_tol = 1e-16);

struct QuadTableRow {
  int n_lambda = 0, n_r = 0, n_theta = 0;
  int n_pt = 0;  // quadrature points of the rule (R of the first column)
  std::vector<double> value, error;  // per radius
};

struct QuadTableResult {
  std::vector<double> radii;
  std::vector<double> reference;  // adaptive oracle values
  std::vector<QuadTableRow> rows;
  double seconds = 0.0;
};

QuadTableResult cmd_quad_table(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Test 1

struct ErrorRecord {
  std::string method;  // FEM or XFEM
  double rho = 0.0;    // 0 for FEM
  int level = 0;
  int divisions = 0;
  int n_standard = 0, n_enriched = 0;
  int N() const { return n_standard + n_enriched; }
  double rel_l2 = 0.0, rel_h1 = 0.0;
  double seconds = 0.0;
};

struct RateRecord {
  std::string method;
  double rho = 0.0;
  std::vector<double> pairwise_l2, pairwise_h1;  // between successive levels
  double fit_l2 = 0.0, fit_h1 = 0.0;             // least-squares slope over all levels
};

/// Slope of log(err) against log(N^{-1/3}).
double observed_rate(int N0, double e0, int N1, double e1);
double fitted_rate(std::span<const int> N, std::span<const double> err);

struct Test1Result {
  std::vector<ErrorRecord> errors;
  std::vector<RateRecord> rates;
  double seconds = 0.0;
};

double test1_exact(const Point3& x, double R);
Eigen::Vector3d test1_exact_gradient(const Point3& x, double R);

Test1Result cmd_test1(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Test 2

struct Test2Run {
  std::string name;
  int divisions = 0;
  int n_standard = 0, n_enriched = 0;
  int uhat_dofs = 0, psi_dofs = 0, phi_dofs = 0;
  Mesh1D mesh_uhat;
  SolutionFields fields;
  SolveReport report;
  double seconds = 0.0;
};

struct Test2Result {
  std::vector<double> s;
  std::vector<Test2Run> runs;  // fem, fem_adapted, xfem
  Eigen::MatrixXd profiles;    // one column per run, sampled at s
  double rel_diff_xfem = 0.0;  // ‖Û_xfem − Û_adapted‖ / ‖Û_adapted‖ in L²(Λ)
  double rel_diff_fem = 0.0;
  double seconds = 0.0;
};

/// P1 interpolation of nodal values on a 1D mesh.
double interpolate_1d(const Mesh1D& mesh, const Eigen::VectorXd& values, double s);

/// ‖a − b‖ / ‖b‖ in L²(0, S) for two P1 fields on different meshes.
double relative_l2_1d(const Mesh1D& ma, const Eigen::VectorXd& a, const Mesh1D& mb, const Eigen::VectorXd& b);

Test2Result cmd_test2(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace xfem3d1d
