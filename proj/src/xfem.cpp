#include "xfem3d1d/xfem.hpp"

#include <cmath>
#include <stdexcept>

namespace xfem3d1d {

double zeta(double d, double R) {
  if (!(R > 0)) throw std::invalid_argument("zeta: R must be positive");
  if (d < 0) throw std::invalid_argument("zeta: negative distance");
  return d > R ? -std::log(d) : -std::log(R);
}

Eigen::Vector3d zeta_gradient(const Point3& x, const Segment<double>& lam, double R) {
  const auto proj = distance_and_projection(x, lam);
  if (proj.distance < R) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d r = x - lam.point(proj.s);
  return -r / (proj.distance * proj.distance);
}

RampEval ramp(const TetBasis& basis, const std::array<int, 4>& tet, const EnrichmentSpec& spec) {
  RampEval out;
  for (int i = 0; i < 4; ++i) {
    if (!spec.in_ramp[tet[i]]) continue;
    out.value += basis.phi[i];
    out.gradient += basis.grad.row(i).transpose();
  }
  return out;
}

XfemSpace::XfemSpace(const TetMesh& mesh, EnrichmentSpec spec) : mesh_(&mesh), spec_(std::move(spec)) {
  geo_.reserve(mesh.tets.size());
  enriched_element_.resize(mesh.tets.size());
  for (int e = 0; e < mesh.num_tets(); ++e) {
    geo_.emplace_back(mesh.tet_points(e));
    enriched_element_[e] = spec_.element_enriched(mesh, e) ? 1 : 0;
  }
  shift_.assign(mesh.vertices.size(), 0.0);
  for (int k : spec_.J) shift_[k] = zeta(distance_and_projection(mesh.vertices[k], spec_.lam).distance, spec_.R);
}

BasisEval XfemSpace::eval_basis(int e, const Point3& x, double tol) const {
  const Eigen::Vector4d l = geo_[e].barycentric(x);
  if (l.minCoeff() < -tol) throw std::invalid_argument("eval_basis: point outside element");
  return eval_basis_unchecked(e, x);
}

BasisEval XfemSpace::eval_basis_unchecked(int e, const Point3& x) const {
  BasisEval b;
  b.element = e;
  b.point = x;
  const TetGeometry& g = geo_[e];
  const Eigen::Vector4d l = g.barycentric(x);
  for (int i = 0; i < 4; ++i) {
    b.phi[i] = l[i];
    b.grad[i] = g.grad.row(i).transpose();
  }
  if (!enriched_element_[e]) return b;

  const auto& tet = mesh_->tets[e];
  double r = 0.0;
  Eigen::Vector3d grad_r = Eigen::Vector3d::Zero();
  for (int i = 0; i < 4; ++i) {
    if (!spec_.in_ramp[tet[i]]) continue;
    r += l[i];
    grad_r += b.grad[i];
  }
  const auto proj = distance_and_projection(x, spec_.lam);
  const double z = zeta(proj.distance, spec_.R);
  Eigen::Vector3d grad_z = Eigen::Vector3d::Zero();
  if (proj.distance >= spec_.R) grad_z = -(x - spec_.lam.point(proj.s)) / (proj.distance * proj.distance);
  const bool corrected = spec_.blending == Blending::corrected;
  for (int i = 0; i < 4; ++i) {
    if (spec_.enriched_index[tet[i]] < 0) continue;
    EnrichedValue& ev = b.enriched[b.n_enriched++];
    ev.local = i;
    ev.vertex = tet[i];
    if (corrected) {
      // φ_k r (ζ − ζ_k)
      const double dz = z - shift_[tet[i]];
      ev.value = l[i] * r * dz;
      ev.grad = b.grad[i] * (r * dz) + l[i] * (grad_r * dz + r * grad_z);
    } else {
      // φ_k (ζ r − ζ_k), r(x_k) = 1 on J
      const double shifted = z * r - shift_[tet[i]];
      ev.value = l[i] * shifted;
      ev.grad = b.grad[i] * shifted + l[i] * (r * grad_z + z * grad_r);
    }
  }
  return b;
}

int XfemSpace::dofs(const BasisEval& b, std::array<int, 8>& out) const {
  const auto& tet = mesh_->tets[b.element];
  for (int i = 0; i < 4; ++i) out[i] = tet[i];
  for (int j = 0; j < b.n_enriched; ++j) out[4 + j] = enriched_dof(b.enriched[j].vertex);
  return 4 + b.n_enriched;
}

double XfemSpace::eval_field(const SolutionFields& fields, const BasisEval& b) const {
  const auto& tet = mesh_->tets[b.element];
  double u = 0.0;
  for (int i = 0; i < 4; ++i) u += fields.U[tet[i]] * b.phi[i];
  for (int j = 0; j < b.n_enriched; ++j)
    u += fields.W[spec_.enriched_index[b.enriched[j].vertex]] * b.enriched[j].value;
  return u;
}

Eigen::Vector3d XfemSpace::eval_gradient(const SolutionFields& fields, const BasisEval& b) const {
  const auto& tet = mesh_->tets[b.element];
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (int i = 0; i < 4; ++i) g += fields.U[tet[i]] * b.grad[i];
  for (int j = 0; j < b.n_enriched; ++j)
    g += fields.W[spec_.enriched_index[b.enriched[j].vertex]] * b.enriched[j].grad;
  return g;
}

double XfemSpace::eval_field(const SolutionFields& fields, const PointLocator& locator, const Point3& x) const {
  const auto hit = locator.locate(x);
  if (!hit) throw std::runtime_error("eval_field: point outside the mesh");
  return eval_field(fields, eval_basis_unchecked(hit->tet, x));
}

}  // namespace xfem3d1d
