#include "xfem3d1d/harness.hpp"

#include "xfem3d1d/adaptive.hpp"
#include "xfem3d1d/vtk.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace xfem3d1d {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_g(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

std::string fmt_sci(double x, int digits = 3) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits - 1) << x;
  return os.str();
}

std::ofstream open_csv(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << std::setprecision(12);
  return out;
}

Strategy parse_strategy(const std::string& key, const std::string& v) {
  if (v == "full_kkt") return Strategy::full_kkt;
  if (v == "reduced") return Strategy::reduced;
  throw std::invalid_argument("config: key '" + key + "' must be full_kkt or reduced");
}

std::string method_tag(const ErrorRecord& r) {
  return r.method == "FEM" ? "FEM" : "XFEM(" + fmt_g(r.rho) + ")";
}

Segment<double> cube_axis() { return Segment<double>(Point3(0, 0, -1), Point3(0, 0, 1)); }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig ExperimentConfig::from(const Config& c, const std::string& experiment) {
  static const std::set<std::string> known{
      "experiment", "output_dir", "threads", "K", "n_lambda", "n_r", "n_theta", "q_in", "q_out",
      "standard_order", "n_circle", "line_points", "enrichment_rings", "table_radii", "table_triples",
      "oracle_tol", "divisions", "R", "rho", "alpha", "error_order", "error_near", "K_tilde", "alpha_hat",
      "source", "gbar", "coarse_divisions", "adapted_divisions", "adapted_axial_divisions", "grading",
      "uhat_dofs", "psi_dofs", "phi_dofs", "adapted_uhat_dofs", "adapted_psi_dofs", "adapted_phi_dofs",
      "profile_points", "coarse_strategy", "adapted_strategy", "write_vtk"};
  for (const auto& k : c.keys())
    if (!known.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");

  ExperimentConfig e;
  e.experiment = c.get_string("experiment", experiment);
  if (e.experiment != experiment)
    throw std::invalid_argument("config: file is for '" + e.experiment + "', not '" + experiment + "'");
  if (experiment != "quad_table" && experiment != "test1" && experiment != "test2")
    throw std::invalid_argument("config: unknown experiment '" + experiment + "'");
  if (experiment == "test2") {
    e.R = 0.01;
    e.rho = {0.01};
    e.alpha = 1.0;
  }

  e.output_dir = c.get_string("output_dir", "");
  e.threads = c.get_int("threads", e.threads);
  e.K = c.get_double("K", e.K);
  e.quad.n_lambda = c.get_int("n_lambda", e.quad.n_lambda);
  e.quad.n_r = c.get_int("n_r", e.quad.n_r);
  e.quad.n_theta = c.get_int("n_theta", e.quad.n_theta);
  e.quad.q_in = c.get_double("q_in", e.quad.q_in);
  e.quad.q_out = c.get_double("q_out", e.quad.q_out);
  e.standard_order = c.get_int("standard_order", e.standard_order);
  e.n_circle = c.get_int("n_circle", e.n_circle);
  e.line_points = c.get_int("line_points", e.line_points);
  e.enrichment_rings = c.get_int("enrichment_rings", e.enrichment_rings);

  e.table_radii = c.get_doubles("table_radii", e.table_radii);
  if (c.has("table_triples")) {
    e.table_triples.clear();
    for (const auto& g : c.get_int_groups("table_triples", {})) {
      if (g.size() != 3) throw std::invalid_argument("config: table_triples entries need three integers");
      e.table_triples.push_back({g[0], g[1], g[2]});
    }
  }
  e.oracle_tol = c.get_double("oracle_tol", e.oracle_tol);

  e.divisions = c.get_ints("divisions", e.divisions);
  e.R = c.get_double("R", e.R);
  e.rho = c.get_doubles("rho", e.rho);
  e.alpha = c.get_double("alpha", e.alpha);
  e.error_order = c.get_int("error_order", e.error_order);
  e.error_near = c.get_double("error_near", e.error_near);

  e.Ktilde = c.get_double("K_tilde", e.Ktilde);
  e.alpha_hat = c.get_double("alpha_hat", e.alpha_hat);
  e.source = c.get_double("source", e.source);
  e.gbar = c.get_double("gbar", e.gbar);
  e.coarse_divisions = c.get_int("coarse_divisions", e.coarse_divisions);
  e.adapted_divisions = c.get_int("adapted_divisions", e.adapted_divisions);
  e.adapted_axial_divisions = c.get_int("adapted_axial_divisions", e.adapted_axial_divisions);
  e.grading = c.get_double("grading", e.grading);
  e.uhat_dofs = c.get_int("uhat_dofs", e.uhat_dofs);
  e.psi_dofs = c.get_int("psi_dofs", e.psi_dofs);
  e.phi_dofs = c.get_int("phi_dofs", e.phi_dofs);
  e.adapted_uhat_dofs = c.get_int("adapted_uhat_dofs", e.adapted_uhat_dofs);
  e.adapted_psi_dofs = c.get_int("adapted_psi_dofs", e.adapted_psi_dofs);
  e.adapted_phi_dofs = c.get_int("adapted_phi_dofs", e.adapted_phi_dofs);
  e.profile_points = c.get_int("profile_points", e.profile_points);
  e.coarse_strategy = parse_strategy("coarse_strategy", c.get_string("coarse_strategy", "full_kkt"));
  e.adapted_strategy = parse_strategy("adapted_strategy", c.get_string("adapted_strategy", "reduced"));
  e.write_vtk = c.get_bool("write_vtk", e.write_vtk);
  e.validate();
  return e;
}

void ExperimentConfig::validate() const {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
  };
  require(threads >= 1, "threads must be at least 1");
  require(K > 0, "K must be positive");
  require(quad.n_lambda >= 1 && quad.n_r >= 1 && quad.n_theta >= 1, "quadrature counts must be positive");
  require(quad.q_in > 0 && quad.q_out > 0, "clustering exponents must be positive");
  require(standard_order >= 1 && standard_order <= 4, "standard_order must lie in [1, 4]");
  require(error_order >= 1 && error_order <= 4, "error_order must lie in [1, 4]");
  require(n_circle >= 3, "n_circle must be at least 3");
  require(line_points >= 1, "line_points must be positive");
  require(enrichment_rings == 0 || enrichment_rings == 1, "enrichment_rings must be 0 or 1");
  for (double r : table_radii) require(r > 0 && r < 1, "table radii must lie in (0, 1)");
  for (const auto& t : table_triples) require(t[0] >= 1 && t[1] >= 1 && t[2] >= 1, "table triples must be positive");
  require(oracle_tol > 0, "oracle_tol must be positive");
  require(!divisions.empty(), "divisions must not be empty");
  for (int n : divisions) require(n >= 1, "divisions must be positive");
  require(R > 0, "R must be positive");
  for (double r : rho) require(r >= R, "every rho must satisfy rho >= R");
  require(alpha >= 0 && alpha_hat >= 0, "alpha and alpha_hat must be non-negative");
  require(Ktilde > 0, "K_tilde must be positive");
  require(coarse_divisions >= 1 && adapted_divisions >= 1, "mesh divisions must be positive");
  require(adapted_axial_divisions >= 0, "adapted_axial_divisions must be non-negative");
  require(grading >= 1, "grading must be at least 1");
  require(uhat_dofs >= 2 && psi_dofs >= 2 && phi_dofs >= 1, "1D DOF counts too small");
  require(adapted_uhat_dofs >= 2 && adapted_psi_dofs >= 2 && adapted_phi_dofs >= 1, "1D DOF counts too small");
  require(profile_points >= 2, "profile_points must be at least 2");
}

// ---------------------------------------------------------------------------
// Error norms

ErrorNorms error_norms(const XfemSpace& space, const SolutionFields& fields, const ScalarField& u_exact,
                       const GradientField& grad_exact, const QuadParams& quad, double near, int order) {
  const auto& mesh = space.mesh();
  const auto& lam = space.spec().lam;
  const double R = space.spec().R;
  const auto ref = standard_tet_rule<double>(order);
  long double e0 = 0, e1 = 0, n0 = 0, n1 = 0;
  for (int e = 0; e < mesh.num_tets(); ++e) {
    const auto pts = mesh.tet_points(e);
    Rule3D<double> rule;
    if (space.element_enriched(e) || segment_tet_distance(lam, pts) <= near) {
      auto er = enriched_tet_rule<double>(pts, lam, R, quad);
      rule = std::move(static_cast<Rule3D<double>&>(er));
    }
    if (rule.size() == 0) rule = map_to_tet(ref, pts);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = space.eval_basis_unchecked(e, rule.points[q]);
      const double uh = space.eval_field(fields, b);
      const Eigen::Vector3d gh = space.eval_gradient(fields, b);
      const double ue = u_exact(rule.points[q]);
      const Eigen::Vector3d ge = grad_exact(rule.points[q]);
      const long double w = rule.weights[q];
      e0 += w * (uh - ue) * (uh - ue);
      e1 += w * (gh - ge).squaredNorm();
      n0 += w * ue * ue;
      n1 += w * ge.squaredNorm();
    }
  }
  if (!(n0 > 0)) throw std::invalid_argument("error_norms: exact solution has zero norm");
  ErrorNorms out;
  out.l2_abs = std::sqrt(static_cast<double>(e0));
  out.h1_abs = std::sqrt(static_cast<double>(e0 + e1));
  out.norm_l2 = std::sqrt(static_cast<double>(n0));
  out.norm_h1 = std::sqrt(static_cast<double>(n0 + n1));
  out.l2 = out.l2_abs / out.norm_l2;
  out.h1 = out.h1_abs / out.norm_h1;
  return out;
}

// ---------------------------------------------------------------------------
// Table 1

double table1_exact(double R) {
  if (!(R > 0 && R < 1)) throw std::invalid_argument("table1_exact: R must lie in (0, 1)");
  return 1.5 - kPi / 4 - 0.5 * std::log(2.0) - kPi * R * R / 8;
}

double table1_adaptive(double R, double rel_tol) {
  if (!(R > 0 && R < 1)) throw std::invalid_argument("table1_adaptive: R must lie in (0, 1)");
  using LD = long double;
  const LD r = R;
  const LD logR = std::log(r);
  // The integrand does not depend on z; integrate over the unit square with
  // breakpoints on the circle x² + y² = R² where ζ has a kink.
  const auto inner = [&](LD x) {
    const auto f = [&](LD y) {
      const LD d2 = x * x + y * y;
      return d2 > r * r ? -0.5L * std::log(d2) : -logR;
    };
    const LD tol = std::max<LD>(rel_tol * 1e-2L, 1e-19L);
    if (x >= r) return integrate_adaptive<LD>(f, 0, 1, tol).value;
    const LD yk = std::sqrt(r * r - x * x);
    return integrate_adaptive<LD>(f, 0, yk, tol).value + integrate_adaptive<LD>(f, yk, 1, tol).value;
  };
  const LD tol = rel_tol;
  const LD value = integrate_adaptive<LD>(inner, 0, r, tol).value + integrate_adaptive<LD>(inner, r, 1, tol).value;
  return static_cast<double>(value);
}

QuadTableResult cmd_quad_table(const ExperimentConfig& cfg, std::ostream* log) {
  const auto t0 = Clock::now();
  QuadTableResult res;
  res.radii = cfg.table_radii;
  for (double R : res.radii) res.reference.push_back(table1_adaptive(R, cfg.oracle_tol));

  std::vector<Point3> verts;
  for (int k = 0; k < 8; ++k) verts.emplace_back(k & 1, (k >> 1) & 1, (k >> 2) & 1);
  std::vector<std::array<int, 2>> edges;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      if (std::popcount(static_cast<unsigned>(a ^ b)) == 1) edges.push_back({a, b});
  const Segment<double> lam(Point3(0, 0, 0), Point3(0, 0, 1));

  for (const auto& t : cfg.table_triples) {
    QuadTableRow row;
    row.n_lambda = t[0];
    row.n_r = t[1];
    row.n_theta = t[2];
    QuadParams p = cfg.quad;
    p.n_lambda = t[0];
    p.n_r = t[1];
    p.n_theta = t[2];
    for (std::size_t i = 0; i < res.radii.size(); ++i) {
      const double R = res.radii[i];
      const auto rule = enriched_rule<double>(verts, edges, lam, R, p);
      double v = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        v += rule.weights[q] * zeta(distance_and_projection(rule.points[q], lam).distance, R);
      if (i == 0) row.n_pt = static_cast<int>(rule.size());
      row.value.push_back(v);
      row.error.push_back(std::abs(v - res.reference[i]) / std::abs(res.reference[i]));
    }
    if (log) {
      *log << "quad-table (" << t[0] << "," << t[1] << "," << t[2] << ") N_pt=" << row.n_pt;
      for (std::size_t i = 0; i < res.radii.size(); ++i) *log << " err(R=" << res.radii[i] << ")=" << fmt_sci(row.error[i]);
      *log << '\n';
    }
    res.rows.push_back(std::move(row));
  }

  if (!cfg.output_dir.empty()) {
    auto out = open_csv(cfg.output_dir, "table1.csv");
    out << "n_lambda,n_r,n_theta,N_pt";
    for (double R : res.radii) out << ",err_R" << fmt_g(R);
    out << '\n';
    for (const auto& row : res.rows) {
      out << row.n_lambda << ',' << row.n_r << ',' << row.n_theta << ',' << row.n_pt;
      for (double e : row.error) out << ',' << fmt_sci(e);
      out << '\n';
    }
  }
  res.seconds = seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// Test 1

double test1_exact(const Point3& x, double R) {
  // (1/10π) log of the distance to the z-axis, with the plateau inside Σ.
  return -zeta(std::hypot(x.x(), x.y()), R) / (10.0 * kPi);
}

Eigen::Vector3d test1_exact_gradient(const Point3& x, double R) {
  const double d2 = x.x() * x.x() + x.y() * x.y();
  if (d2 < R * R) return Eigen::Vector3d::Zero();
  return Eigen::Vector3d(x.x(), x.y(), 0.0) / (10.0 * kPi * d2);
}

double observed_rate(int N0, double e0, int N1, double e1) {
  if (N0 <= 0 || N1 <= 0 || N0 == N1 || !(e0 > 0) || !(e1 > 0))
    throw std::invalid_argument("observed_rate: need distinct positive N and positive errors");
  return std::log(e1 / e0) / std::log(std::cbrt(static_cast<double>(N0) / N1));
}

double fitted_rate(std::span<const int> N, std::span<const double> err) {
  if (N.size() != err.size() || N.size() < 2) throw std::invalid_argument("fitted_rate: need at least two levels");
  const int n = static_cast<int>(N.size());
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (N[i] <= 0 || !(err[i] > 0)) throw std::invalid_argument("fitted_rate: non-positive data");
    x[i] = -std::log(static_cast<double>(N[i])) / 3.0;
    y[i] = std::log(err[i]);
  }
  const double xm = x.mean(), ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  if (!(sxx > 0)) throw std::invalid_argument("fitted_rate: degenerate abscissas");
  return ((x.array() - xm) * (y.array() - ym)).sum() / sxx;
}

Test1Result cmd_test1(const ExperimentConfig& cfg, std::ostream* log) {
  const auto t0 = Clock::now();
  Test1Result res;
  const auto lam = cube_axis();
  const double R = cfg.R;
  AssemblyOptions opts;
  opts.quad = cfg.quad;
  opts.standard_order = cfg.standard_order;
  opts.threads = cfg.threads;

  ForwardProblem pb;
  pb.K = cfg.K;
  pb.alpha = cfg.alpha;
  pb.phi = [R](double) { return -1.0 / (10.0 * kPi * R); };
  pb.dirichlet = [R](const Point3& x) { return test1_exact(x, R); };
  pb.dirichlet_tags = {BoundaryTag::parallel};
  pb.line_points = cfg.line_points;
  pb.n_circle = cfg.n_circle;
  const ScalarField ue = [R](const Point3& x) { return test1_exact(x, R); };
  const GradientField ge = [R](const Point3& x) { return test1_exact_gradient(x, R); };

  std::vector<double> methods{0.0};  // 0 encodes FEM
  methods.insert(methods.end(), cfg.rho.begin(), cfg.rho.end());

  for (std::size_t level = 0; level < cfg.divisions.size(); ++level) {
    const int n = cfg.divisions[level];
    const TetMesh mesh = structured_cube_mesh(2.0, n);
    const PointLocator locator(mesh);
    pb.line_mesh = uniform_mesh_1d(lam.length(), n, Basis1D::p0);
    const bool finest = level + 1 == cfg.divisions.size();
    for (double rho : methods) {
      const auto t1 = Clock::now();
      const bool fem = rho == 0.0;
      const XfemSpace space(mesh, fem ? no_enrichment(mesh, lam, R)
                                      : classify_enrichment(mesh, lam, R, rho, cfg.enrichment_rings));
      const SolutionFields fields = solve_forward_3d(space, locator, pb, opts);
      const ErrorNorms err = error_norms(space, fields, ue, ge, cfg.quad, std::max(rho, cfg.error_near), cfg.error_order);
      ErrorRecord rec;
      rec.method = fem ? "FEM" : "XFEM";
      rec.rho = rho;
      rec.level = static_cast<int>(level);
      rec.divisions = n;
      rec.n_standard = space.n_standard();
      rec.n_enriched = space.n_enriched();
      rec.rel_l2 = err.l2;
      rec.rel_h1 = err.h1;
      rec.seconds = seconds_since(t1);
      if (log)
        *log << "test1 " << method_tag(rec) << " n=" << n << " N=" << rec.N() << " L2=" << fmt_sci(rec.rel_l2)
             << " H1=" << fmt_sci(rec.rel_h1) << " (" << fmt_g(rec.seconds, 3) << " s)\n";
      if (finest && cfg.write_vtk && !cfg.output_dir.empty()) {
        Eigen::VectorXd exact(mesh.num_vertices());
        for (int k = 0; k < mesh.num_vertices(); ++k) exact[k] = ue(mesh.vertices[k]);
        std::filesystem::create_directories(cfg.output_dir);
        const std::string name = fem ? "test1_fem.vtk" : "test1_xfem_rho" + fmt_g(rho) + ".vtk";
        write_vtk(cfg.output_dir / name, mesh, {{"u", fields.U}, {"u_exact", exact}}, "test1 " + method_tag(rec));
      }
      res.errors.push_back(rec);
    }
  }

  for (double rho : methods) {
    RateRecord rr;
    rr.method = rho == 0.0 ? "FEM" : "XFEM";
    rr.rho = rho;
    std::vector<int> N;
    std::vector<double> l2, h1;
    for (const auto& e : res.errors)
      if (e.rho == rho) {
        N.push_back(e.N());
        l2.push_back(e.rel_l2);
        h1.push_back(e.rel_h1);
      }
    for (std::size_t i = 0; i + 1 < N.size(); ++i) {
      rr.pairwise_l2.push_back(observed_rate(N[i], l2[i], N[i + 1], l2[i + 1]));
      rr.pairwise_h1.push_back(observed_rate(N[i], h1[i], N[i + 1], h1[i + 1]));
    }
    if (N.size() >= 2) {
      rr.fit_l2 = fitted_rate(N, l2);
      rr.fit_h1 = fitted_rate(N, h1);
    }
    res.rates.push_back(rr);
  }

  if (!cfg.output_dir.empty()) {
    auto out = open_csv(cfg.output_dir, "test1_errors.csv");
    out << "method,rho,level,divisions,N,n_standard,n_enriched,rel_L2,rel_H1\n";
    for (const auto& e : res.errors)
      out << method_tag(e) << ',' << fmt_g(e.rho) << ',' << e.level << ',' << e.divisions << ',' << e.N() << ','
          << e.n_standard << ',' << e.n_enriched << ',' << fmt_sci(e.rel_l2, 6) << ',' << fmt_sci(e.rel_h1, 6)
          << '\n';
    auto rates = open_csv(cfg.output_dir, "test1_rates.csv");
    rates << "method,rho,kind,from_level,to_level,rate_L2,rate_H1\n";
    for (const auto& r : res.rates) {
      ErrorRecord tag;
      tag.method = r.method;
      tag.rho = r.rho;
      for (std::size_t i = 0; i < r.pairwise_l2.size(); ++i)
        rates << method_tag(tag) << ',' << fmt_g(r.rho) << ",pair," << i << ',' << i + 1 << ','
              << fmt_g(r.pairwise_l2[i], 3) << ',' << fmt_g(r.pairwise_h1[i], 3) << '\n';
      if (!r.pairwise_l2.empty())
        rates << method_tag(tag) << ',' << fmt_g(r.rho) << ",fit,0," << r.pairwise_l2.size() << ','
              << fmt_g(r.fit_l2, 3) << ',' << fmt_g(r.fit_h1, 3) << '\n';
    }
  }
  res.seconds = seconds_since(t0);
  return res;
}

// ---------------------------------------------------------------------------
// Test 2

double interpolate_1d(const Mesh1D& mesh, const Eigen::VectorXd& values, double s) {
  if (mesh.basis != Basis1D::p1 || values.size() != mesh.num_dofs())
    throw std::invalid_argument("interpolate_1d: expected P1 nodal values");
  const std::array<double, 1> at{s};
  return (evaluation_matrix(mesh, at) * values)[0];
}

double relative_l2_1d(const Mesh1D& ma, const Eigen::VectorXd& a, const Mesh1D& mb, const Eigen::VectorXd& b) {
  const std::array<Mesh1D, 2> meshes{ma, mb};
  const auto quad = line_quadrature(meshes, 3);
  const Eigen::VectorXd va = evaluation_matrix(ma, quad.s) * a;
  const Eigen::VectorXd vb = evaluation_matrix(mb, quad.s) * b;
  const double den = std::sqrt(vb.cwiseAbs2().dot(quad.w));
  if (!(den > 0)) throw std::invalid_argument("relative_l2_1d: reference has zero norm");
  return std::sqrt((va - vb).cwiseAbs2().dot(quad.w)) / den;
}

Test2Result cmd_test2(const ExperimentConfig& cfg, std::ostream* log) {
  const auto t0 = Clock::now();
  Test2Result res;
  const auto lam = cube_axis();
  const double S = lam.length();
  AssemblyOptions opts;
  opts.quad = cfg.quad;
  opts.standard_order = cfg.standard_order;
  opts.threads = cfg.threads;

  if (cfg.phi_dofs > cfg.uhat_dofs - 1 || cfg.adapted_phi_dofs > cfg.adapted_uhat_dofs - 1)
    if (log) *log << "warning: the Φ mesh is finer than the Û mesh; the discrete problem may lose stability\n";

  struct Setup {
    std::string name;
    bool graded, enriched;
    int n, nu, npsi, nphi;
    Strategy strategy;
  };
  const std::vector<Setup> setups{
      {"fem", false, false, cfg.coarse_divisions, cfg.uhat_dofs, cfg.psi_dofs, cfg.phi_dofs, cfg.coarse_strategy},
      {"fem_adapted", true, false, cfg.adapted_divisions, cfg.adapted_uhat_dofs, cfg.adapted_psi_dofs,
       cfg.adapted_phi_dofs, cfg.adapted_strategy},
      {"xfem", false, true, cfg.coarse_divisions, cfg.uhat_dofs, cfg.psi_dofs, cfg.phi_dofs, cfg.coarse_strategy}};

  const double source = cfg.source, gbar = cfg.gbar;
  for (const auto& st : setups) {
    const auto t1 = Clock::now();
    const TetMesh mesh = st.graded ? graded_cube_mesh(2.0, st.n, cfg.grading, lam, cfg.adapted_axial_divisions)
                                   : structured_cube_mesh(2.0, st.n);
    const PointLocator locator(mesh);
    const XfemSpace space(mesh, st.enriched ? classify_enrichment(mesh, lam, cfg.R, cfg.rho.front(), cfg.enrichment_rings)
                                            : no_enrichment(mesh, lam, cfg.R));
    CoupledProblem pb;
    pb.K = cfg.K;
    pb.Ktilde = cfg.Ktilde;
    pb.alpha = cfg.alpha;
    pb.alpha_hat = cfg.alpha_hat;
    pb.f = [source](const Point3&) { return source; };
    pb.gbar = [gbar](double) { return gbar; };
    pb.dirichlet_tags = {BoundaryTag::perp};
    pb.uhat_dirichlet = true;
    pb.mesh_uhat = uniform_mesh_1d(S, st.nu - 1, Basis1D::p1);
    pb.mesh_psi = uniform_mesh_1d(S, st.npsi - 1, Basis1D::p1);
    pb.mesh_phi = uniform_mesh_1d(S, st.nphi, Basis1D::p0);
    pb.line_points = cfg.line_points;
    pb.n_circle = cfg.n_circle;
    pb.strategy = st.strategy;
    const CoupledSolution sol = solve_coupled(space, locator, pb, opts);

    Test2Run run;
    run.name = st.name;
    run.divisions = st.n;
    run.n_standard = space.n_standard();
    run.n_enriched = space.n_enriched();
    run.uhat_dofs = pb.mesh_uhat.num_dofs();
    run.psi_dofs = pb.mesh_psi.num_dofs();
    run.phi_dofs = pb.mesh_phi.num_dofs();
    run.mesh_uhat = pb.mesh_uhat;
    run.fields = sol.fields;
    run.report = sol.report;
    run.seconds = seconds_since(t1);
    if (log)
      *log << "test2 " << run.name << " n=" << run.divisions << " 3D DOFs=" << run.n_standard << "+" << run.n_enriched
           << " 1D DOFs (Uhat,Psi,Phi)=(" << run.uhat_dofs << "," << run.psi_dofs << "," << run.phi_dofs
           << ") J=" << fmt_sci(run.report.J) << " res=(" << fmt_sci(run.report.residual_var1) << ","
           << fmt_sci(run.report.residual_var2) << ") [" << run.report.strategy << ", " << fmt_g(run.seconds, 3)
           << " s]\n";
    if (cfg.write_vtk && !cfg.output_dir.empty()) {
      std::filesystem::create_directories(cfg.output_dir);
      write_vtk(cfg.output_dir / ("test2_" + run.name + ".vtk"), mesh, {{"u", run.fields.U}}, "test2 " + run.name);
    }
    res.runs.push_back(std::move(run));
  }

  const int P = cfg.profile_points;
  res.profiles.resize(P, static_cast<Eigen::Index>(res.runs.size()));
  for (int i = 0; i < P; ++i) {
    res.s.push_back(S * i / (P - 1));
    for (std::size_t j = 0; j < res.runs.size(); ++j)
      res.profiles(i, j) = interpolate_1d(res.runs[j].mesh_uhat, res.runs[j].fields.Uhat, res.s.back());
  }
  const auto& ref = res.runs[1];
  res.rel_diff_fem = relative_l2_1d(res.runs[0].mesh_uhat, res.runs[0].fields.Uhat, ref.mesh_uhat, ref.fields.Uhat);
  res.rel_diff_xfem = relative_l2_1d(res.runs[2].mesh_uhat, res.runs[2].fields.Uhat, ref.mesh_uhat, ref.fields.Uhat);
  if (log)
    *log << "test2 relative L2(Lambda) difference to fem_adapted: xfem=" << fmt_sci(res.rel_diff_xfem)
         << " fem=" << fmt_sci(res.rel_diff_fem) << '\n';

  if (!cfg.output_dir.empty()) {
    auto out = open_csv(cfg.output_dir, "test2_profiles.csv");
    out << "s,u_fem,u_fem_adapted,u_xfem\n";
    for (int i = 0; i < P; ++i)
      out << res.s[i] << ',' << res.profiles(i, 0) << ',' << res.profiles(i, 1) << ',' << res.profiles(i, 2) << '\n';
    auto sum = open_csv(cfg.output_dir, "test2_summary.csv");
    sum << "run,divisions,n_standard,n_enriched,uhat_dofs,psi_dofs,phi_dofs,J,residual_var1,residual_var2,"
           "rel_L2_to_adapted\n";
    for (std::size_t j = 0; j < res.runs.size(); ++j) {
      const auto& r = res.runs[j];
      const double diff = j == 0 ? res.rel_diff_fem : (j == 2 ? res.rel_diff_xfem : 0.0);
      sum << r.name << ',' << r.divisions << ',' << r.n_standard << ',' << r.n_enriched << ',' << r.uhat_dofs << ','
          << r.psi_dofs << ',' << r.phi_dofs << ',' << fmt_sci(r.report.J) << ',' << fmt_sci(r.report.residual_var1)
          << ',' << fmt_sci(r.report.residual_var2) << ',' << fmt_sci(diff, 6) << '\n';
    }
  }
  res.seconds = seconds_since(t0);
  return res;
}

}  // namespace xfem3d1d
