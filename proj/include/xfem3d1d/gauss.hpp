#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace xfem3d1d {

/// n-point Gauss–Legendre rule on [0, 1].
template <typename Scalar = double>
struct GaussRule1D {
  int n = 0;
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;
};

/// Newton iteration on the roots of P_n, seeded with the Tricomi estimate.
template <typename Scalar = double>
GaussRule1D<Scalar> gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: n must lie in [1, 64]");
  GaussRule1D<Scalar> rule;
  rule.n = n;
  rule.nodes.assign(n, Scalar(0));
  rule.weights.assign(n, Scalar(0));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar eps = 4 * std::numeric_limits<Scalar>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar z = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp(0);
    for (int it = 0; it < 100; ++it) {
      Scalar p0(1), p1(0);
      for (int j = 1; j <= n; ++j) {
        const Scalar p2 = p1;
        p1 = p0;
        p0 = ((2 * j - 1) * z * p1 - (j - 1) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const Scalar dz = p0 / dp;
      z -= dz;
      if (abs(dz) <= eps) break;
    }
    // Final derivative at the converged root.
    {
      Scalar p0(1), p1(0);
      for (int j = 1; j <= n; ++j) {
        const Scalar p2 = p1;
        p1 = p0;
        p0 = ((2 * j - 1) * z * p1 - (j - 1) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
    }
    const Scalar w = 2 / ((1 - z * z) * dp * dp);
    rule.nodes[i] = (1 - z) / 2;
    rule.nodes[n - 1 - i] = (1 + z) / 2;
    rule.weights[i] = w / 2;
    rule.weights[n - 1 - i] = w / 2;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = Scalar(1) / 2;
  return rule;
}

}  // namespace xfem3d1d
