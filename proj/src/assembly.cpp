#include "xfem3d1d/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace xfem3d1d {

namespace {

constexpr double kPi = std::numbers::pi;

// Runs body(e, triplets) over all elements; per-thread buffers are merged in
// element order so the result does not depend on scheduling.
template <typename Body>
std::vector<Triplet> for_each_element(int n_elements, int threads, Body&& body) {
  threads = std::clamp(threads, 1, std::max(1, n_elements));
  std::vector<std::vector<Triplet>> buffers(threads);
  const auto run = [&](int t) {
    const int begin = static_cast<int>(static_cast<long long>(n_elements) * t / threads);
    const int end = static_cast<int>(static_cast<long long>(n_elements) * (t + 1) / threads);
    for (int e = begin; e < end; ++e) body(e, buffers[t]);
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run, t);
  }
  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& b : buffers) total += b.size();
  all.reserve(total);
  for (auto& b : buffers) all.insert(all.end(), b.begin(), b.end());
  return all;
}

const Rule3D<double>& reference_rule(int order) {
  static const std::array<Rule3D<double>, 4> rules{standard_tet_rule<double>(1), standard_tet_rule<double>(2),
                                                   standard_tet_rule<double>(3), standard_tet_rule<double>(4)};
  if (order < 1 || order > 4) throw std::invalid_argument("reference_rule: order must lie in [1, 4]");
  return rules[order - 1];
}

SparseMatrix diagonal(const Eigen::VectorXd& d) {
  SparseMatrix D(d.size(), d.size());
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (int i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

}  // namespace

Rule3D<double> element_rule(const XfemSpace& space, int e, const QuadParams& quad, int standard_order) {
  const auto pts = space.mesh().tet_points(e);
  if (space.element_enriched(e)) {
    auto rule = enriched_tet_rule<double>(pts, space.spec().lam, space.spec().R, quad);
    return std::move(static_cast<Rule3D<double>&>(rule));
  }
  return map_to_tet(reference_rule(standard_order), pts);
}

SparseMatrix assemble_stiffness_3d(const XfemSpace& space, double K, const AssemblyOptions& opts) {
  if (!(K > 0)) throw std::invalid_argument("assemble_stiffness_3d: K must be positive");
  const auto& mesh = space.mesh();
  auto triplets = for_each_element(mesh.num_tets(), opts.threads, [&](int e, std::vector<Triplet>& out) {
    const TetGeometry& g = space.geometry(e);
    const auto& tet = mesh.tets[e];
    if (!space.element_enriched(e)) {
      const Eigen::Matrix4d ke = K * g.volume * g.grad * g.grad.transpose();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.emplace_back(tet[i], tet[j], ke(i, j));
      return;
    }
    const auto rule = element_rule(space, e, opts.quad, opts.standard_order);
    Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 3> grads;
    std::array<int, 8> dofs{};
    int n = 4;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = space.eval_basis_unchecked(e, rule.points[q]);
      n = space.dofs(b, dofs);
      for (int i = 0; i < 4; ++i) grads.row(i) = b.grad[i].transpose();
      for (int j = 0; j < b.n_enriched; ++j) grads.row(4 + j) = b.enriched[j].grad.transpose();
      ke.topLeftCorner(n, n).noalias() += (K * rule.weights[q]) * grads.topRows(n) * grads.topRows(n).transpose();
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.emplace_back(dofs[i], dofs[j], ke(i, j));
  });
  SparseMatrix A(space.num_dofs(), space.num_dofs());
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

Eigen::VectorXd assemble_load_3d(const XfemSpace& space, const ScalarField& f, const AssemblyOptions& opts) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
  if (!f) return b;
  const auto& mesh = space.mesh();
  auto triplets = for_each_element(mesh.num_tets(), opts.threads, [&](int e, std::vector<Triplet>& out) {
    const auto rule = element_rule(space, e, opts.quad, opts.standard_order);
    std::array<int, 8> dofs{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval bv = space.eval_basis_unchecked(e, rule.points[q]);
      const int n = space.dofs(bv, dofs);
      const double wf = rule.weights[q] * f(rule.points[q]);
      for (int i = 0; i < 4; ++i) out.emplace_back(dofs[i], 0, wf * bv.phi[i]);
      for (int j = 4; j < n; ++j) out.emplace_back(dofs[j], 0, wf * bv.enriched[j - 4].value);
    }
  });
  for (const auto& t : triplets) b[t.row()] += t.value();
  return b;
}

LineQuadrature line_quadrature(std::span<const Mesh1D> meshes, int points) {
  if (meshes.empty()) throw std::invalid_argument("line_quadrature: no meshes");
  std::vector<double> breaks;
  for (const auto& m : meshes) breaks.insert(breaks.end(), m.nodes.begin(), m.nodes.end());
  std::sort(breaks.begin(), breaks.end());
  const double S = breaks.back() - breaks.front();
  std::vector<double> unique;
  for (double b : breaks)
    if (unique.empty() || b - unique.back() > 1e-12 * S) unique.push_back(b);
  const auto g = gauss_legendre<double>(points);
  LineQuadrature quad;
  std::vector<double> w;
  for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
    const double h = unique[i + 1] - unique[i];
    for (int k = 0; k < g.n; ++k) {
      quad.s.push_back(unique[i] + h * g.nodes[k]);
      w.push_back(h * g.weights[k]);
    }
  }
  quad.w = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return quad;
}

TraceOperator assemble_trace_matrix(const XfemSpace& space, const PointLocator& locator, LineQuadrature quad,
                                    int n_circle) {
  if (n_circle < 3) throw std::invalid_argument("assemble_trace_matrix: need at least 3 circle points");
  const auto& spec = space.spec();
  const auto& lam = spec.lam;
  std::vector<Triplet> t;
  std::array<int, 8> dofs{};
  const double weight = 1.0 / n_circle;
  for (int q = 0; q < quad.size(); ++q) {
    for (int j = 0; j < n_circle; ++j) {
      // Half-step offset keeps samples off the coordinate planes of the mesh.
      const double theta = 2.0 * kPi * (j + 0.5) / n_circle;
      const Point3 x = lam.from_section(quad.s[q], spec.R * Point2(std::cos(theta), std::sin(theta)));
      const auto hit = locator.locate(x);
      if (!hit) throw std::runtime_error("assemble_trace_matrix: circle point outside the mesh");
      const BasisEval b = space.eval_basis_unchecked(hit->tet, x);
      const int n = space.dofs(b, dofs);
      for (int i = 0; i < 4; ++i) t.emplace_back(q, dofs[i], weight * b.phi[i]);
      for (int i = 4; i < n; ++i) t.emplace_back(q, dofs[i], weight * b.enriched[i - 4].value);
    }
  }
  TraceOperator op;
  op.n_circle = n_circle;
  op.G.resize(quad.size(), space.num_dofs());
  op.G.setFromTriplets(t.begin(), t.end());
  op.quad = std::move(quad);
  return op;
}

SparseMatrix evaluation_matrix(const Mesh1D& mesh, std::span<const double> s, bool derivative) {
  std::vector<Triplet> t;
  const auto& x = mesh.nodes;
  for (std::size_t q = 0; q < s.size(); ++q) {
    auto it = std::upper_bound(x.begin(), x.end(), s[q]);
    const int e = std::clamp(static_cast<int>(it - x.begin()) - 1, 0, mesh.num_elements() - 1);
    const double h = x[e + 1] - x[e];
    const int row = static_cast<int>(q);
    if (mesh.basis == Basis1D::p0) {
      if (!derivative) t.emplace_back(row, e, 1.0);
      continue;
    }
    const double tau = (s[q] - x[e]) / h;
    if (derivative) {
      t.emplace_back(row, e, -1.0 / h);
      t.emplace_back(row, e + 1, 1.0 / h);
    } else {
      t.emplace_back(row, e, 1.0 - tau);
      t.emplace_back(row, e + 1, tau);
    }
  }
  SparseMatrix M(static_cast<Eigen::Index>(s.size()), mesh.num_dofs());
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

OneDBlocks assemble_1d(const Mesh1D& mesh_u, double Ktilde, double R, double alpha_hat) {
  if (!(Ktilde > 0)) throw std::invalid_argument("assemble_1d: Ktilde must be positive");
  if (mesh_u.basis != Basis1D::p1) throw std::invalid_argument("assemble_1d: Uhat must use P1");
  const int n = mesh_u.num_dofs();
  std::vector<Triplet> ks, ms;
  for (int e = 0; e < mesh_u.num_elements(); ++e) {
    const double h = mesh_u.nodes[e + 1] - mesh_u.nodes[e];
    const int i = e, j = e + 1;
    ks.insert(ks.end(), {{i, i, 1.0 / h}, {j, j, 1.0 / h}, {i, j, -1.0 / h}, {j, i, -1.0 / h}});
    ms.insert(ms.end(), {{i, i, h / 3.0}, {j, j, h / 3.0}, {i, j, h / 6.0}, {j, i, h / 6.0}});
  }
  OneDBlocks out;
  out.stiffness.resize(n, n);
  out.mass.resize(n, n);
  out.stiffness.setFromTriplets(ks.begin(), ks.end());
  out.mass.setFromTriplets(ms.begin(), ms.end());
  out.Ahat = (Ktilde * kPi * R * R) * out.stiffness + (alpha_hat * 2.0 * kPi * R) * out.mass;
  return out;
}

CouplingBlocks assemble_coupling(const TraceOperator& trace, const Mesh1D& mesh_phi, const Mesh1D& mesh_u1d,
                                 const Mesh1D& mesh_psi, double R, double alpha, double alpha_hat) {
  const double S = mesh_u1d.length();
  for (const auto* m : {&mesh_phi, &mesh_psi})
    if (std::abs(m->length() - S) > 1e-12 * S) throw std::invalid_argument("assemble_coupling: mismatched Λ lengths");
  const double gamma = 2.0 * kPi * R;
  const auto& s = trace.quad.s;
  CouplingBlocks c;
  c.Q = evaluation_matrix(mesh_u1d, s);
  c.Pphi = evaluation_matrix(mesh_phi, s);
  c.Ppsi = evaluation_matrix(mesh_psi, s);
  const SparseMatrix W = diagonal(trace.quad.w);
  const SparseMatrix GtW = SparseMatrix(trace.G.transpose()) * W;
  const SparseMatrix QtW = SparseMatrix(c.Q.transpose()) * W;
  c.B = gamma * GtW * c.Pphi;
  c.Bhat = gamma * QtW * c.Pphi;
  c.Cpsi = (alpha * gamma) * GtW * c.Ppsi;
  c.Cpsihat = (alpha_hat * gamma) * QtW * c.Ppsi;
  c.trace_mass = (alpha * gamma) * GtW * trace.G;
  return c;
}

RhsBlocks assemble_rhs(const XfemSpace& space, const ScalarField& f, const Mesh1D& mesh_u1d,
                       const LineQuadrature& quad, const LineField& gbar, double R, const AssemblyOptions& opts) {
  RhsBlocks rhs;
  rhs.f_D = assemble_load_3d(space, f, opts);
  rhs.g_Lambda = Eigen::VectorXd::Zero(mesh_u1d.num_dofs());
  if (!gbar) return rhs;
  Eigen::VectorXd vals(quad.size());
  for (int q = 0; q < quad.size(); ++q) vals[q] = quad.w[q] * kPi * R * R * gbar(quad.s[q]);
  rhs.g_Lambda = evaluation_matrix(mesh_u1d, quad.s).transpose() * vals;
  return rhs;
}

Constraint Constraint::from_mask(std::span<const char> constrained, const Eigen::VectorXd& values) {
  Constraint c;
  c.full_size = static_cast<int>(constrained.size());
  if (values.size() != c.full_size) throw std::invalid_argument("Constraint: value vector size mismatch");
  std::vector<double> v;
  for (int i = 0; i < c.full_size; ++i) {
    if (constrained[i]) {
      c.fixed.push_back(i);
      v.push_back(values[i]);
    } else {
      c.free.push_back(i);
    }
  }
  c.fixed_values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return c;
}

Eigen::VectorXd Constraint::expand(const Eigen::VectorXd& free_values) const {
  if (free_values.size() != static_cast<Eigen::Index>(free.size()))
    throw std::invalid_argument("Constraint::expand: size mismatch");
  Eigen::VectorXd x(full_size);
  for (std::size_t i = 0; i < free.size(); ++i) x[free[i]] = free_values[i];
  for (std::size_t i = 0; i < fixed.size(); ++i) x[fixed[i]] = fixed_values[i];
  return x;
}

Eigen::VectorXd Constraint::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd x(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) x[i] = full[free[i]];
  return x;
}

SparseMatrix select_rows(const SparseMatrix& A, std::span<const int> rows) {
  SparseMatrix S(static_cast<Eigen::Index>(rows.size()), A.rows());
  std::vector<Triplet> t;
  t.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) t.emplace_back(static_cast<int>(i), rows[i], 1.0);
  S.setFromTriplets(t.begin(), t.end());
  return S * A;
}

SparseMatrix select_cols(const SparseMatrix& A, std::span<const int> cols) {
  SparseMatrix S(A.cols(), static_cast<Eigen::Index>(cols.size()));
  std::vector<Triplet> t;
  t.reserve(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) t.emplace_back(cols[i], static_cast<int>(i), 1.0);
  S.setFromTriplets(t.begin(), t.end());
  return A * S;
}

ReducedSystem apply_dirichlet(const SparseMatrix& A, const Eigen::VectorXd& b, const Constraint& c) {
  if (A.rows() != c.full_size || A.cols() != c.full_size || b.size() != c.full_size)
    throw std::invalid_argument("apply_dirichlet: dimension mismatch");
  ReducedSystem r;
  r.constraint = c;
  const SparseMatrix rows = select_rows(A, c.free);
  r.A = select_cols(rows, c.free);
  r.b = c.restrict(b);
  if (!c.fixed.empty()) r.b -= select_cols(rows, c.fixed) * c.fixed_values;
  return r;
}

double asymmetry(const SparseMatrix& A) {
  const SparseMatrix D = A - SparseMatrix(A.transpose());
  const double amax = A.coeffs().size() ? A.coeffs().cwiseAbs().maxCoeff() : 0.0;
  const double dmax = D.coeffs().size() ? D.coeffs().cwiseAbs().maxCoeff() : 0.0;
  return amax > 0 ? dmax / amax : 0.0;
}

}  // namespace xfem3d1d
