#include "xfem3d1d/optsolve.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace xfem3d1d {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SparseMatrix weighted(const Eigen::VectorXd& w) {
  SparseMatrix W(w.size(), w.size());
  std::vector<Triplet> t;
  for (int i = 0; i < w.size(); ++i) t.emplace_back(i, i, w[i]);
  W.setFromTriplets(t.begin(), t.end());
  return W;
}

void add_block(std::vector<Triplet>& t, const SparseMatrix& M, int r0, int c0, double scale = 1.0, bool transpose = false) {
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it) {
      const int r = static_cast<int>(transpose ? it.col() : it.row());
      const int c = static_cast<int>(transpose ? it.row() : it.col());
      t.emplace_back(r0 + r, c0 + c, scale * it.value());
    }
}

double norm_inf(const SparseMatrix& K) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(K.rows());
  for (int k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double relative(const Eigen::VectorXd& r, double scale) {
  return scale > 0 ? r.norm() / scale : r.norm();
}

void fill_residuals(const ReducedBlocks& rb, const Eigen::VectorXd& U, const Eigen::VectorXd& Uh,
                    const Eigen::VectorXd& Phi, const Eigen::VectorXd& Psi, SolveReport& rep) {
  const Eigen::VectorXd AU = rb.A * U, BP = rb.B * Phi, CP = rb.C * Psi;
  rep.residual_var1 = relative(AU - BP - CP - rb.f, rb.f.norm() + AU.norm() + BP.norm() + CP.norm());
  const Eigen::VectorXd AUh = rb.Ahat * Uh, BhP = rb.Bhat * Phi, ChP = rb.Chat * Psi;
  rep.residual_var2 = relative(AUh + BhP - ChP - rb.g, rb.g.norm() + AUh.norm() + BhP.norm() + ChP.norm());
  const Eigen::VectorXd r1 = rb.G * U + rb.o_U - rb.P * Psi;
  const Eigen::VectorXd r2 = rb.Q * Uh + rb.o_Uhat - rb.P * Psi;
  rep.J = 0.5 * (r1.dot(rb.w.cwiseProduct(r1)) + r2.dot(rb.w.cwiseProduct(r2)));
  rep.n_U = rb.n_U();
  rep.n_Uhat = rb.n_Uhat();
  rep.n_Phi = rb.n_Phi();
  rep.n_Psi = rb.n_Psi();
}

SolutionFields expand_fields(const ReducedBlocks& rb, const Eigen::VectorXd& U, const Eigen::VectorXd& Uh,
                             const Eigen::VectorXd& Phi, const Eigen::VectorXd& Psi) {
  SolutionFields out;
  const Eigen::VectorXd full = rb.c3d.expand(U);
  out.U = full.head(rb.n_standard);
  out.W = full.tail(full.size() - rb.n_standard);
  out.Uhat = rb.c1d.expand(Uh);
  out.Phi = Phi;
  out.Psi = Psi;
  return out;
}

class SpdFactor {
 public:
  explicit SpdFactor(const SparseMatrix& A) {
    ldlt_.compute(A);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("solve_spd: factorization failed");
    const Eigen::VectorXd d = ldlt_.vectorD();
    if (d.size() == 0) return;
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(d.minCoeff() > 1e-14 * dmax)) throw std::runtime_error("solve_spd: matrix is singular or not positive definite");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return ldlt_.solve(b); }

 private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

}  // namespace

double functional_J(const Eigen::VectorXd& U, const Eigen::VectorXd& Uhat, const Eigen::VectorXd& Psi,
                    const SparseMatrix& G, const SparseMatrix& Q, const SparseMatrix& P, const Eigen::VectorXd& w) {
  if (G.cols() != U.size() || Q.cols() != Uhat.size() || P.cols() != Psi.size() || G.rows() != w.size() ||
      Q.rows() != w.size() || P.rows() != w.size())
    throw std::invalid_argument("functional_J: dimension mismatch");
  const Eigen::VectorXd ps = P * Psi;
  const Eigen::VectorXd r1 = G * U - ps, r2 = Q * Uhat - ps;
  return 0.5 * (r1.dot(w.cwiseProduct(r1)) + r2.dot(w.cwiseProduct(r2)));
}

ReducedBlocks reduce_blocks(const BlockSystem& b, const Constraint& c3d, const Constraint& c1d) {
  if (b.A.rows() != c3d.full_size || b.Ahat.rows() != c1d.full_size)
    throw std::invalid_argument("reduce_blocks: constraint size mismatch");
  ReducedBlocks rb;
  rb.c3d = c3d;
  rb.c1d = c1d;
  const auto a = apply_dirichlet(b.A, b.f_D, c3d);
  rb.A = a.A;
  rb.f = a.b;
  const auto ah = apply_dirichlet(b.Ahat, b.g_Lambda, c1d);
  rb.Ahat = ah.A;
  rb.g = ah.b;
  rb.B = select_rows(b.B, c3d.free);
  rb.C = select_rows(b.Cpsi, c3d.free);
  rb.Bhat = select_rows(b.Bhat, c1d.free);
  rb.Chat = select_rows(b.Cpsihat, c1d.free);
  rb.G = select_cols(b.G, c3d.free);
  rb.Q = select_cols(b.Q, c1d.free);
  rb.P = b.P;
  rb.w = b.w;
  rb.o_U = Eigen::VectorXd::Zero(b.w.size());
  rb.o_Uhat = Eigen::VectorXd::Zero(b.w.size());
  if (!c3d.fixed.empty()) rb.o_U = select_cols(b.G, c3d.fixed) * c3d.fixed_values;
  if (!c1d.fixed.empty()) rb.o_Uhat = select_cols(b.Q, c1d.fixed) * c1d.fixed_values;
  return rb;
}

KKTSystem build_kkt(const ReducedBlocks& rb) {
  const int nu = rb.n_U(), nh = rb.n_Uhat(), nf = rb.n_Phi(), ns = rb.n_Psi();
  if (rb.A.rows() != nu || rb.B.rows() != nu || rb.C.rows() != nu || rb.Ahat.rows() != nh || rb.Bhat.rows() != nh ||
      rb.Chat.rows() != nh || rb.Bhat.cols() != nf || rb.Chat.cols() != ns || rb.G.cols() != nu ||
      rb.Q.cols() != nh || rb.P.cols() != ns || rb.f.size() != nu || rb.g.size() != nh)
    throw std::invalid_argument("build_kkt: dimension mismatch");

  KKTSystem sys;
  sys.sizes = {nu, nh, nf, ns, nu, nh};
  sys.offsets[0] = 0;
  for (int i = 0; i < 6; ++i) sys.offsets[i + 1] = sys.offsets[i] + sys.sizes[i];
  const auto& o = sys.offsets;

  const SparseMatrix W = weighted(rb.w);
  const SparseMatrix Gt = rb.G.transpose(), Qt = rb.Q.transpose(), Pt = rb.P.transpose();
  const SparseMatrix GtWG = Gt * W * rb.G, GtWP = Gt * W * rb.P;
  const SparseMatrix QtWQ = Qt * W * rb.Q, QtWP = Qt * W * rb.P;
  const SparseMatrix PtWP = Pt * W * rb.P;

  std::vector<Triplet> t;
  // Hessian of J.
  add_block(t, GtWG, o[0], o[0]);
  add_block(t, GtWP, o[0], o[3], -1.0);
  add_block(t, GtWP, o[3], o[0], -1.0, true);
  add_block(t, QtWQ, o[1], o[1]);
  add_block(t, QtWP, o[1], o[3], -1.0);
  add_block(t, QtWP, o[3], o[1], -1.0, true);
  add_block(t, PtWP, o[3], o[3], 2.0);
  // Constraint rows and their transposes.
  add_block(t, rb.A, o[4], o[0]);
  add_block(t, rb.B, o[4], o[2], -1.0);
  add_block(t, rb.C, o[4], o[3], -1.0);
  add_block(t, rb.Ahat, o[5], o[1]);
  add_block(t, rb.Bhat, o[5], o[2]);
  add_block(t, rb.Chat, o[5], o[3], -1.0);
  add_block(t, rb.A, o[0], o[4], 1.0, true);
  add_block(t, rb.B, o[2], o[4], -1.0, true);
  add_block(t, rb.C, o[3], o[4], -1.0, true);
  add_block(t, rb.Ahat, o[1], o[5], 1.0, true);
  add_block(t, rb.Bhat, o[2], o[5], 1.0, true);
  add_block(t, rb.Chat, o[3], o[5], -1.0, true);
  sys.K.resize(o[6], o[6]);
  sys.K.setFromTriplets(t.begin(), t.end());

  sys.rhs = Eigen::VectorXd::Zero(o[6]);
  const Eigen::VectorXd wo1 = rb.w.cwiseProduct(rb.o_U), wo2 = rb.w.cwiseProduct(rb.o_Uhat);
  sys.rhs.segment(o[0], nu) = -(Gt * wo1);
  sys.rhs.segment(o[1], nh) = -(Qt * wo2);
  sys.rhs.segment(o[3], ns) = Pt * (wo1 + wo2);
  sys.rhs.segment(o[4], nu) = rb.f;
  sys.rhs.segment(o[5], nh) = rb.g;
  return sys;
}

LinearSolve solve_sparse(const SparseMatrix& K, const Eigen::VectorXd& b, const SparseSolveOptions& opts) {
  if (K.rows() != K.cols() || K.rows() != b.size()) throw std::invalid_argument("solve_sparse: dimension mismatch");
  // Symmetric equilibration D K D with D = diag(1/sqrt(max_j |K_ij|)); the
  // Ψ/Û blocks and the 3D blocks differ by the factor K̃ otherwise.
  Eigen::VectorXd rowmax = Eigen::VectorXd::Zero(K.rows());
  for (int k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it)
      rowmax[it.row()] = std::max(rowmax[it.row()], std::abs(it.value()));
  Eigen::VectorXd d(K.rows());
  for (int i = 0; i < d.size(); ++i) d[i] = rowmax[i] > 0 ? 1.0 / std::sqrt(rowmax[i]) : 1.0;
  SparseMatrix Ks = d.asDiagonal() * K * d.asDiagonal();
  Ks.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(Ks);
  lu.factorize(Ks);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve_sparse: singular factorization (" + lu.lastErrorMessage() + ")");

  LinearSolve out;
  // Probe with a fixed random right-hand side: a near-null direction shows up
  // as a huge solution relative to the data.
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd z(b.size());
  for (int i = 0; i < z.size(); ++i) z[i] = uni(rng);
  const Eigen::VectorXd y = lu.solve(z);
  out.condition_estimate = norm_inf(Ks) * y.lpNorm<Eigen::Infinity>() / z.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(out.condition_estimate) || out.condition_estimate > opts.max_condition)
    throw std::runtime_error("solve_sparse: matrix is numerically singular (condition estimate " +
                             std::to_string(out.condition_estimate) + ")");

  const auto correction = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return d.cwiseProduct(lu.solve(d.cwiseProduct(r)));
  };
  const double knorm = norm_inf(K);
  out.x = correction(b);
  const auto backward = [&](const Eigen::VectorXd& r) {
    const double denom = knorm * out.x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    return denom > 0 ? r.lpNorm<Eigen::Infinity>() / denom : 0.0;
  };
  Eigen::VectorXd r = b - K * out.x;
  out.backward_error = backward(r);
  while (out.backward_error > opts.refine_tol && out.refinements < opts.max_refinements) {
    out.x += correction(r);
    r = b - K * out.x;
    out.backward_error = backward(r);
    ++out.refinements;
  }
  if (!out.x.allFinite()) throw std::runtime_error("solve_sparse: non-finite solution");
  return out;
}

Eigen::VectorXd solve_spd(const SparseMatrix& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw std::invalid_argument("solve_spd: dimension mismatch");
  return SpdFactor(A).solve(b);
}

SolutionFields solve_forward_3d(const XfemSpace& space, const PointLocator& locator, const ForwardProblem& pb,
                                const AssemblyOptions& opts, SolveReport* report) {
  const auto t0 = Clock::now();
  const auto& mesh = space.mesh();
  const double R = space.spec().R;
  const DofMap dm = make_dof_map(mesh, space.spec(), pb.dirichlet_tags);

  const std::array<Mesh1D, 1> breaks{pb.line_mesh};
  const auto trace = assemble_trace_matrix(space, locator, line_quadrature(breaks, pb.line_points), pb.n_circle);
  const SparseMatrix W = weighted(trace.quad.w);
  const SparseMatrix GtW = SparseMatrix(trace.G.transpose()) * W;
  const double gamma = 2.0 * std::numbers::pi * R;

  SparseMatrix A = assemble_stiffness_3d(space, pb.K, opts);
  if (pb.alpha != 0.0) A += (pb.alpha * gamma) * SparseMatrix(GtW * trace.G);
  Eigen::VectorXd b = assemble_load_3d(space, pb.f, opts);
  if (pb.phi) {
    Eigen::VectorXd phi(trace.quad.size());
    for (int q = 0; q < phi.size(); ++q) phi[q] = pb.phi(trace.quad.s[q]);
    b += gamma * (GtW * phi);
  }

  Eigen::VectorXd values = Eigen::VectorXd::Zero(dm.size());
  if (pb.dirichlet)
    for (int k : dm.dirichlet_nodes) values[k] = pb.dirichlet(mesh.vertices[k]);
  const auto c = Constraint::from_mask(dm.constrained, values);
  const auto red = apply_dirichlet(A, b, c);
  const Eigen::VectorXd full = c.expand(solve_spd(red.A, red.b));

  if (report) {
    *report = SolveReport{};
    report->strategy = "spd";
    report->n_U = static_cast<int>(c.free.size());
    report->residual_var1 = relative(red.A * c.restrict(full) - red.b, red.b.norm());
    report->wall_seconds = seconds_since(t0);
  }
  SolutionFields out;
  out.U = full.head(space.n_standard());
  out.W = full.tail(space.n_enriched());
  return out;
}

ReducedBlocks assemble_coupled(const XfemSpace& space, const PointLocator& locator, const CoupledProblem& pb,
                               const AssemblyOptions& opts) {
  const auto& mesh = space.mesh();
  const double R = space.spec().R;
  const double S = space.spec().lam.length();
  for (const auto* m : {&pb.mesh_uhat, &pb.mesh_psi, &pb.mesh_phi})
    if (m->num_elements() < 1 || std::abs(m->length() - S) > 1e-12 * S)
      throw std::invalid_argument("assemble_coupled: 1D meshes must cover Λ");
  if (pb.mesh_uhat.basis != Basis1D::p1 || pb.mesh_psi.basis != Basis1D::p1 || pb.mesh_phi.basis != Basis1D::p0)
    throw std::invalid_argument("assemble_coupled: expected P1 Û, P1 Ψ and P0 Φ");

  const DofMap dm = make_dof_map(mesh, space.spec(), pb.dirichlet_tags);
  const std::array<Mesh1D, 3> breaks{pb.mesh_uhat, pb.mesh_psi, pb.mesh_phi};
  const auto trace = assemble_trace_matrix(space, locator, line_quadrature(breaks, pb.line_points), pb.n_circle);
  const auto cb = assemble_coupling(trace, pb.mesh_phi, pb.mesh_uhat, pb.mesh_psi, R, pb.alpha, pb.alpha_hat);
  const auto od = assemble_1d(pb.mesh_uhat, pb.Ktilde, R, pb.alpha_hat);
  const auto rhs = assemble_rhs(space, pb.f, pb.mesh_uhat, trace.quad, pb.gbar, R, opts);

  BlockSystem bs;
  bs.A = assemble_stiffness_3d(space, pb.K, opts) + cb.trace_mass;
  bs.Ahat = od.Ahat;
  bs.B = cb.B;
  bs.Bhat = cb.Bhat;
  bs.Cpsi = cb.Cpsi;
  bs.Cpsihat = cb.Cpsihat;
  bs.f_D = rhs.f_D;
  bs.g_Lambda = rhs.g_Lambda;
  bs.alpha = pb.alpha;
  bs.alpha_hat = pb.alpha_hat;
  bs.G = trace.G;
  bs.Q = cb.Q;
  bs.P = cb.Ppsi;
  bs.w = trace.quad.w;

  Eigen::VectorXd v3 = Eigen::VectorXd::Zero(dm.size());
  if (pb.dirichlet)
    for (int k : dm.dirichlet_nodes) v3[k] = pb.dirichlet(mesh.vertices[k]);
  const int nh = pb.mesh_uhat.num_dofs();
  std::vector<char> mask1(nh, 0);
  Eigen::VectorXd v1 = Eigen::VectorXd::Zero(nh);
  if (pb.uhat_dirichlet && nh >= 2) {
    mask1[0] = 1;
    mask1[nh - 1] = 1;
    v1[0] = pb.uhat_left;
    v1[nh - 1] = pb.uhat_right;
  }
  auto rb = reduce_blocks(bs, Constraint::from_mask(dm.constrained, v3), Constraint::from_mask(mask1, v1));
  rb.n_standard = space.n_standard();
  return rb;
}

CoupledSolution solve_reduced_blocks(const ReducedBlocks& rb, Strategy strategy) {
  const auto t0 = Clock::now();
  CoupledSolution out;
  Eigen::VectorXd U, Uh, Phi, Psi;
  const int nf = rb.n_Phi(), ns = rb.n_Psi();

  if (strategy == Strategy::full_kkt) {
    const KKTSystem sys = build_kkt(rb);
    const LinearSolve ls = solve_sparse(sys.K, sys.rhs);
    U = sys.block(ls.x, 0);
    Uh = sys.block(ls.x, 1);
    Phi = sys.block(ls.x, 2);
    Psi = sys.block(ls.x, 3);
    out.p = sys.block(ls.x, 4);
    out.p_hat = sys.block(ls.x, 5);
    out.report.strategy = "full_kkt";
    out.report.refinements = ls.refinements;
    out.report.backward_error = ls.backward_error;
    out.report.kkt_residual = relative(sys.K * ls.x - sys.rhs, sys.rhs.norm());
    out.report.n_multipliers = sys.sizes[4] + sys.sizes[5];
  } else {
    // Eliminate U and Û through the constraints, leaving a weighted linear
    // least-squares problem in the controls z = [Φ; Ψ].
    const SpdFactor fa(rb.A), fh(rb.Ahat);
    const int nq = static_cast<int>(rb.w.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * nq, nf + ns);
    Eigen::VectorXd r0(2 * nq);
    r0.head(nq) = rb.G * fa.solve(rb.f) + rb.o_U;
    r0.tail(nq) = rb.Q * fh.solve(rb.g) + rb.o_Uhat;
    const Eigen::MatrixXd P = Eigen::MatrixXd(rb.P);
    for (int j = 0; j < nf; ++j) {
      M.col(j).head(nq) = rb.G * fa.solve(rb.B.col(j));
      M.col(j).tail(nq) = -(rb.Q * fh.solve(rb.Bhat.col(j)));
    }
    for (int j = 0; j < ns; ++j) {
      M.col(nf + j).head(nq) = rb.G * fa.solve(rb.C.col(j)) - P.col(j);
      M.col(nf + j).tail(nq) = rb.Q * fh.solve(rb.Chat.col(j)) - P.col(j);
    }
    Eigen::VectorXd sw(2 * nq);
    sw.head(nq) = rb.w.cwiseSqrt();
    sw.tail(nq) = rb.w.cwiseSqrt();
    const Eigen::MatrixXd Ms = sw.asDiagonal() * M;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ms);
    qr.setThreshold(1e-13);
    if (qr.rank() < nf + ns) throw std::runtime_error("solve_coupled: control problem is rank deficient");
    const Eigen::VectorXd z = qr.solve(-(sw.cwiseProduct(r0)));
    Phi = z.head(nf);
    Psi = z.tail(ns);
    U = fa.solve(rb.f + rb.B * Phi + rb.C * Psi);
    Uh = fh.solve(rb.g - rb.Bhat * Phi + rb.Chat * Psi);
    out.report.strategy = "reduced";
  }
  fill_residuals(rb, U, Uh, Phi, Psi, out.report);
  out.fields = expand_fields(rb, U, Uh, Phi, Psi);
  out.report.wall_seconds = seconds_since(t0);
  return out;
}

CoupledSolution solve_coupled(const XfemSpace& space, const PointLocator& locator, const CoupledProblem& problem,
                              const AssemblyOptions& opts) {
  const auto t0 = Clock::now();
  const ReducedBlocks rb = assemble_coupled(space, locator, problem, opts);
  CoupledSolution out = solve_reduced_blocks(rb, problem.strategy);
  out.report.wall_seconds = seconds_since(t0);
  return out;
}

}  // namespace xfem3d1d
