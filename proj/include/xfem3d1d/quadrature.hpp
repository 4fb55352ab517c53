#pragma once

// Quadrature for integrands of the form (piecewise smooth) × ζ(d_Λ(x)).
//
// A tetrahedron (or any convex polyhedron) is integrated as ∫ f_ζ(s) ds over
// the projection intervals of its vertices on Λ, with f_ζ(s) the integral over
// the planar section p(s). Each section is covered by polar pieces around the
// centreline trace; on every piece ρ = R·r^q, with Gauss–Legendre nodes in θ
// across the piece and in r across [(ρ_in/R)^{1/q}, (ρ_out/R)^{1/q}].

#include "xfem3d1d/gauss.hpp"
#include "xfem3d1d/geometry.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace xfem3d1d {

template <typename Scalar = double>
struct Rule2D {
  std::vector<Vector2<Scalar>> points;
  std::vector<Scalar> weights;
  std::size_t size() const { return weights.size(); }
};

template <typename Scalar = double>
struct Rule3D {
  std::vector<Vector3<Scalar>> points;
  std::vector<Scalar> weights;
  std::size_t size() const { return weights.size(); }
};

struct QuadParams {
  int n_lambda = 3;
  int n_r = 5;
  int n_theta = 16;
  double q_in = 1.0;
  double q_out = 3.0;
};

template <typename Scalar = double>
struct EnrichedRule : Rule3D<Scalar> {
  QuadParams params;
};

/// Polar map (r, θ) ↦ ρ = R r^q along direction θ; Jacobian of the planar
/// area element is q R² r^{2q−1}.
template <typename Scalar = double>
struct PolarMap {
  Scalar q;
  Scalar R;
  Scalar radius(Scalar r) const {
    using std::pow;
    return R * pow(r, q);
  }
  Scalar parameter(Scalar rho) const {
    using std::pow;
    return pow(rho / R, 1 / q);
  }
  Scalar jacobian(Scalar r) const {
    using std::pow;
    return q * R * R * pow(r, 2 * q - 1);
  }
};

template <typename Scalar, typename F>
Scalar integrate(const Rule3D<Scalar>& rule, F&& f) {
  Scalar sum(0);
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(rule.points[i]);
  return sum;
}

template <typename Scalar, typename F>
Scalar integrate(const Rule2D<Scalar>& rule, F&& f) {
  Scalar sum(0);
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(rule.points[i]);
  return sum;
}

// ---------------------------------------------------------------------------
// Standard rules on the reference tetrahedron {0, e1, e2, e3}.

/// Positive-weight rule exact up to the given polynomial order (1–4). Orders 3
/// and 4 use the collapsed (conical product) Gauss–Legendre construction.
template <typename Scalar = double>
Rule3D<Scalar> standard_tet_rule(int order) {
  Rule3D<Scalar> rule;
  switch (order) {
    case 1:
      rule.points.push_back(Vector3<Scalar>::Constant(Scalar(1) / 4));
      rule.weights.push_back(Scalar(1) / 6);
      return rule;
    case 2: {
      using std::sqrt;
      const Scalar a = (5 - sqrt(Scalar(5))) / 20, b = 1 - 3 * a;
      for (int i = 0; i < 4; ++i) {
        Vector3<Scalar> p = Vector3<Scalar>::Constant(a);
        if (i < 3) p[i] = b;
        rule.points.push_back(p);
        rule.weights.push_back(Scalar(1) / 24);
      }
      return rule;
    }
    case 3:
    case 4: {
      const auto gu = gauss_legendre<Scalar>((order + 4) / 2);
      const auto gv = gauss_legendre<Scalar>((order + 3) / 2);
      const auto gw = gauss_legendre<Scalar>((order + 2) / 2);
      for (int i = 0; i < gu.n; ++i)
        for (int j = 0; j < gv.n; ++j)
          for (int k = 0; k < gw.n; ++k) {
            const Scalar u = gu.nodes[i], v = gv.nodes[j], w = gw.nodes[k];
            rule.points.emplace_back(u, (1 - u) * v, (1 - u) * (1 - v) * w);
            rule.weights.push_back(gu.weights[i] * gv.weights[j] * gw.weights[k] * (1 - u) * (1 - u) *
                                   (1 - v));
          }
      return rule;
    }
    default: throw std::invalid_argument("standard_tet_rule: order must lie in [1, 4]");
  }
}

template <typename Scalar>
Scalar tet_signed_volume(const std::array<Vector3<Scalar>, 4>& t) {
  return (t[1] - t[0]).cross(t[2] - t[0]).dot(t[3] - t[0]) / 6;
}

/// Affine image of a reference rule on a physical tetrahedron.
template <typename Scalar>
Rule3D<Scalar> map_to_tet(const Rule3D<Scalar>& ref, const std::array<Vector3<Scalar>, 4>& tet) {
  using std::abs;
  Eigen::Matrix<Scalar, 3, 3> J;
  J << tet[1] - tet[0], tet[2] - tet[0], tet[3] - tet[0];
  const Scalar det = abs(J.determinant());
  Rule3D<Scalar> out;
  out.points.reserve(ref.size());
  out.weights.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.points.push_back(tet[0] + J * ref.points[i]);
    out.weights.push_back(ref.weights[i] * det);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Section and enriched rules

/// Bisects [t0, t1] until Gauss in θ resolves every straight bound: the
/// poles of 1/cos(θ − foot) must lie outside a Bernstein ellipse with
/// ρ^(2n) ≥ 1e13.
template <typename Scalar>
void angular_spans(const CoverPiece<Scalar>& piece, int n_theta, Scalar t0, Scalar t1, int depth,
                   std::vector<std::array<Scalar, 2>>& out) {
  using std::abs;
  using std::log;
  using std::remainder;
  using std::sqrt;
  const Scalar c = (t0 + t1) / 2;
  const Scalar h = (t1 - t0) / 2;
  bool resolved = true;
  for (const auto* b : {&piece.inner, &piece.outer}) {
    if (b->kind != RadialBound<Scalar>::Kind::line || !(h > Scalar(0))) continue;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar gap = pi / 2 - abs(remainder(c - b->foot, 2 * pi));
    const Scalar z = gap / h;
    if (!(z > Scalar(1)) || 2 * n_theta * log(z + sqrt(z * z - 1)) < Scalar(13 * 2.302585092994046))
      resolved = false;
  }
  if (resolved || depth >= 16) {
    out.push_back({t0, t1});
    return;
  }
  angular_spans(piece, n_theta, t0, (t0 + t1) / 2, depth + 1, out);
  angular_spans(piece, n_theta, (t0 + t1) / 2, t1, depth + 1, out);
}

/// Composite polar rule over the covering of a section polygon.
template <typename Scalar = double>
Rule2D<Scalar> section_rule(const SectionPolygon<Scalar>& poly, Scalar R, int n_r, int n_theta,
                            Scalar q_in = 1, Scalar q_out = 3) {
  using std::cos;
  using std::sin;
  Rule2D<Scalar> rule;
  const auto pieces = cover_polygon(poly, R);
  if (pieces.empty()) return rule;
  const auto gr = gauss_legendre<Scalar>(n_r);
  const auto gt = gauss_legendre<Scalar>(n_theta);
  rule.points.reserve(pieces.size() * n_r * n_theta);
  rule.weights.reserve(pieces.size() * n_r * n_theta);
  std::vector<std::array<Scalar, 2>> spans;
  for (const auto& piece : pieces) {
    const PolarMap<Scalar> map{piece.region == Region::inside ? q_in : q_out, R};
    spans.clear();
    angular_spans(piece, n_theta, piece.theta0, piece.theta1, 0, spans);
    for (const auto& [t0, t1] : spans)
    for (int j = 0; j < n_theta; ++j) {
      const Scalar dtheta = t1 - t0;
      const Scalar theta = t0 + dtheta * gt.nodes[j];
      const Vector2<Scalar> dir(cos(theta), sin(theta));
      const Scalar r0 = map.parameter(piece.inner(theta));
      const Scalar r1 = map.parameter(piece.outer(theta));
      for (int i = 0; i < n_r; ++i) {
        const Scalar r = r0 + (r1 - r0) * gr.nodes[i];
        rule.points.push_back(piece.center + map.radius(r) * dir);
        rule.weights.push_back(gt.weights[j] * dtheta * gr.weights[i] * (r1 - r0) * map.jacobian(r));
      }
    }
  }
  return rule;
}

/// Tensor rule on a convex polyhedron: Gauss–Legendre in s on every
/// non-degenerate interval between vertex abscissas, section rules across.
template <typename Scalar = double>
EnrichedRule<Scalar> enriched_rule(std::span<const Vector3<Scalar>> vertices,
                                   std::span<const std::array<int, 2>> edges, const Segment<Scalar>& lam,
                                   Scalar R, const QuadParams& params) {
  EnrichedRule<Scalar> rule;
  rule.params = params;
  std::vector<Scalar> s;
  for (const auto& v : vertices) s.push_back(std::clamp(lam.abscissa(v), Scalar(0), lam.length()));
  std::sort(s.begin(), s.end());
  const Scalar span = s.back() - s.front();
  if (!(span > Scalar(0))) return rule;
  const auto gs = gauss_legendre<Scalar>(params.n_lambda);
  for (std::size_t t = 0; t + 1 < s.size(); ++t) {
    const Scalar len = s[t + 1] - s[t];
    if (len <= Scalar(1e-14) * span) continue;
    for (int k = 0; k < gs.n; ++k) {
      const Scalar sk = s[t] + len * gs.nodes[k];
      const auto poly = slice_convex<Scalar>(vertices, edges, lam, sk);
      const auto sec = section_rule<Scalar>(poly, R, params.n_r, params.n_theta, Scalar(params.q_in),
                                            Scalar(params.q_out));
      for (std::size_t i = 0; i < sec.size(); ++i) {
        rule.points.push_back(lam.from_section(sk, sec.points[i]));
        rule.weights.push_back(gs.weights[k] * len * sec.weights[i]);
      }
    }
  }
  return rule;
}

template <typename Scalar = double>
EnrichedRule<Scalar> enriched_tet_rule(const std::array<Vector3<Scalar>, 4>& tet, const Segment<Scalar>& lam,
                                       Scalar R, const QuadParams& params) {
  return enriched_rule<Scalar>(std::span<const Vector3<Scalar>>(tet.data(), 4),
                               std::span<const std::array<int, 2>>(kTetEdges), lam, R, params);
}

}  // namespace xfem3d1d
