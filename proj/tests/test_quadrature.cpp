#include "xfem3d1d/adaptive.hpp"
#include "xfem3d1d/harness.hpp"
#include "xfem3d1d/quadrature.hpp"
#include "xfem3d1d/xfem.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <random>

using namespace xfem3d1d;

namespace {

const Segment<double> kEdge{Point3(0, 0, 0), Point3(0, 0, 1)};

struct Cube {
  std::vector<Point3> v;
  std::vector<std::array<int, 2>> e;
  Cube() {
    for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        if (std::popcount(static_cast<unsigned>(i ^ j)) == 1) e.push_back({i, j});
  }
};

double cube_zeta_error(double R, int n_lambda, int n_r, int n_theta, std::size_t* n_pt = nullptr) {
  const Cube c;
  const QuadParams qp{n_lambda, n_r, n_theta, 1.0, 3.0};
  const auto rule = enriched_rule<double>(c.v, c.e, kEdge, R, qp);
  if (n_pt) *n_pt = rule.size();
  const double I = integrate(rule, [&](const Point3& x) { return zeta(distance_and_projection(x, kEdge).distance, R); });
  const double ex = table1_exact(R);
  return std::abs(I - ex) / std::abs(ex);
}

long double factorial(int n) {
  long double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// ∫ x^a y^b z^c over the reference tetrahedron.
double monomial_integral(int a, int b, int c) {
  return static_cast<double>(factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3));
}

const std::array<Point3, 4> kTet{Point3(0.05, -0.1, 0.1), Point3(0.4, 0.05, 0.2), Point3(-0.1, 0.35, 0.3),
                                 Point3(0.1, 0.1, 0.7)};

}  // namespace

TEST(GaussLegendre, Midpoint) {
  const auto g = gauss_legendre<double>(1);
  EXPECT_DOUBLE_EQ(g.nodes[0], 0.5);
  EXPECT_DOUBLE_EQ(g.weights[0], 1.0);
}

TEST(GaussLegendre, TwoPoint) {
  const auto g = gauss_legendre<double>(2);
  EXPECT_NEAR(g.nodes[0], 0.5 - 1 / (2 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(g.nodes[1], 0.5 + 1 / (2 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(g.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(g.weights[1], 0.5, 1e-15);
}

TEST(GaussLegendre, ExactnessDegree) {
  const auto g = gauss_legendre<double>(5);
  double s = 0;
  for (int i = 0; i < g.n; ++i) s += g.weights[i] * std::pow(g.nodes[i], 9);
  EXPECT_NEAR(s, 0.1, 1e-14);
}

TEST(GaussLegendre, WeightsPositiveAndSumToOne) {
  for (int n : {1, 3, 8, 17, 64}) {
    const auto g = gauss_legendre<double>(n);
    double s = 0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(g.weights[i], 0.0);
      EXPECT_GT(g.nodes[i], 0.0);
      EXPECT_LT(g.nodes[i], 1.0);
      s += g.weights[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
}

TEST(GaussLegendre, RejectsOutOfRange) {
  EXPECT_THROW(gauss_legendre<double>(0), std::invalid_argument);
  EXPECT_THROW(gauss_legendre<double>(65), std::invalid_argument);
}

TEST(StandardTetRule, Centroid) {
  const auto r = standard_tet_rule<double>(1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r.points[0].isApprox(Point3::Constant(0.25)));
  EXPECT_DOUBLE_EQ(r.weights[0], 1.0 / 6);
}

TEST(StandardTetRule, OrderTwoIntegratesLinear) {
  const auto r = standard_tet_rule<double>(2);
  EXPECT_NEAR(integrate(r, [](const Point3& x) { return x.sum(); }), 1.0 / 8, 1e-15);
}

TEST(StandardTetRule, OrderFourMonomial) {
  const auto r = standard_tet_rule<double>(4);
  EXPECT_NEAR(integrate(r, [](const Point3& x) { return x[0] * x[0] * x[1] * x[2]; }), monomial_integral(2, 1, 1),
              1e-14);
}

TEST(StandardTetRule, ExactUpToOrder) {
  for (int order = 1; order <= 4; ++order) {
    const auto r = standard_tet_rule<double>(order);
    double wsum = 0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0 / 6, 1e-15);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b)
        for (int c = 0; a + b + c <= order; ++c) {
          const double I = integrate(r, [&](const Point3& x) {
            return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
          });
          EXPECT_NEAR(I, monomial_integral(a, b, c), 1e-15) << order << ": " << a << b << c;
        }
  }
  EXPECT_THROW(standard_tet_rule<double>(5), std::invalid_argument);
}

TEST(SectionRule, UnitSquareArea) {
  Cube c;
  const auto poly = slice_convex<double>(c.v, c.e, kEdge, 0.5);
  const auto rule = section_rule<double>(poly, 0.1, 5, 16);
  EXPECT_NEAR(integrate(rule, [](const Point2&) { return 1.0; }), 1.0, 1e-12);
}

TEST(SectionRule, ZetaOverSquareMatchesOracle) {
  // f_ζ is constant in s for the cube, so the section integral is the cube integral.
  Cube c;
  const auto poly = slice_convex<double>(c.v, c.e, kEdge, 0.5);
  for (double R : {0.1, 0.3}) {
    const auto rule = section_rule<double>(poly, R, 8, 12);
    const double I = integrate(rule, [&](const Point2& p) { return zeta(p.norm(), R); });
    EXPECT_NEAR(I, table1_adaptive(R), 1e-14);
  }
}

TEST(SectionRule, QuarterDiskIndicator) {
  Cube c;
  const auto poly = slice_convex<double>(c.v, c.e, kEdge, 0.5);
  const double R = 0.1, value = 2.5;
  const auto rule = section_rule<double>(poly, R, 3, 4);
  // Inside points satisfy |p| ≤ R exactly up to rounding, so the indicator is resolved piecewise.
  const double I = integrate(rule, [&](const Point2& p) { return p.norm() <= R * (1 + 1e-12) ? value : 0.0; });
  EXPECT_NEAR(I, value * std::numbers::pi * R * R / 4, 1e-13);
}

TEST(EnrichedRule, Table1PointCounts) {
  std::size_t n = 0;
  cube_zeta_error(0.1, 1, 4, 9, &n);
  EXPECT_EQ(n, 144u);
  cube_zeta_error(0.1, 1, 6, 9, &n);
  EXPECT_EQ(n, 216u);
  cube_zeta_error(0.1, 1, 8, 12, &n);
  EXPECT_EQ(n, 384u);
}

TEST(EnrichedRule, Table1ErrorLevels) {
  // Within half an order of magnitude of the reference errors, finest row at round-off.
  const auto within = [](double got, double ref) { return got <= ref * std::sqrt(10.0) && got >= ref / std::sqrt(10.0); };
  EXPECT_TRUE(within(cube_zeta_error(0.1, 1, 4, 9), 9.85e-08));
  EXPECT_TRUE(within(cube_zeta_error(0.3, 1, 4, 9), 2.97e-09));
  EXPECT_TRUE(within(cube_zeta_error(0.1, 1, 6, 9), 6.45e-12));
  EXPECT_TRUE(within(cube_zeta_error(0.3, 1, 6, 9), 1.75e-12));
  EXPECT_LE(cube_zeta_error(0.1, 1, 8, 12), 1e-14);
  EXPECT_LE(cube_zeta_error(0.3, 1, 8, 12), 1e-14);
}

TEST(EnrichedRule, MonotoneErrorDecay) {
  for (double R : {0.1, 0.3}) {
    const double e1 = cube_zeta_error(R, 1, 4, 9), e2 = cube_zeta_error(R, 1, 6, 9), e3 = cube_zeta_error(R, 1, 8, 12);
    EXPECT_GT(e1, e2) << R;
    EXPECT_GT(e2, e3) << R;
  }
}

TEST(EnrichedRule, VolumeAndPositivity) {
  const Segment<double> lam(Point3(0.1, 0.1, -1), Point3(0.1, 0.1, 1));
  for (double R : {0.01, 0.1, 1.0}) {
    const auto rule = enriched_tet_rule<double>(kTet, lam, R, QuadParams{});
    double vol = 0;
    for (double w : rule.weights) {
      EXPECT_GT(w, 0.0);
      vol += w;
    }
    EXPECT_NEAR(vol, std::abs(tet_signed_volume(kTet)), 1e-12 * std::abs(tet_signed_volume(kTet)));
    TetGeometry geo(kTet);
    for (const auto& p : rule.points) EXPECT_GE(geo.barycentric(p).minCoeff(), -1e-12);
  }
}

TEST(EnrichedRule, AffineMatchesStandardRule) {
  const Segment<double> lam(Point3(0.1, 0.1, -1), Point3(0.1, 0.1, 1));
  const auto f = [](const Point3& x) { return 1.5 - 2 * x[0] + 0.7 * x[1] + 3 * x[2]; };
  const auto rule = enriched_tet_rule<double>(kTet, lam, 0.05, QuadParams{});
  const double ref = integrate(map_to_tet(standard_tet_rule<double>(2), kTet), f);
  EXPECT_NEAR(integrate(rule, f), ref, 1e-12 * std::abs(ref));
}

TEST(EnrichedRule, LinearTimesPlateauConstant) {
  // R larger than the tet: ζ is the constant −log R everywhere.
  const Segment<double> lam(Point3(0.1, 0.1, -1), Point3(0.1, 0.1, 1));
  const double R = 2.0;
  const auto f = [&](const Point3& x) { return (1 + x[0] - x[2]) * zeta(distance_and_projection(x, lam).distance, R); };
  const auto rule = enriched_tet_rule<double>(kTet, lam, R, QuadParams{});
  const double ref =
      -std::log(R) * integrate(map_to_tet(standard_tet_rule<double>(2), kTet), [](const Point3& x) { return 1 + x[0] - x[2]; });
  EXPECT_NEAR(integrate(rule, f), ref, 1e-12 * std::abs(ref));
}

TEST(EnrichedRule, QInvarianceOnSmoothIntegrand) {
  const Segment<double> lam(Point3(0.1, 0.1, -1), Point3(0.1, 0.1, 1));
  const auto f = [](const Point3& x) { return std::exp(x[0]) * std::cos(x[1] + 2 * x[2]); };
  const auto r1 = enriched_tet_rule<double>(kTet, lam, 0.05, QuadParams{3, 8, 16, 1.0, 1.0});
  const auto r3 = enriched_tet_rule<double>(kTet, lam, 0.05, QuadParams{3, 8, 16, 1.0, 3.0});
  EXPECT_NEAR(integrate(r1, f), integrate(r3, f), 1e-8);
}

namespace {

// Adaptive integration in s of fine polar section integrals.
double zeta_slice_oracle(const Segment<double>& lam, double R) {
  const auto sv = vertex_abscissas(kTet, lam);
  double oracle = 0;
  for (int t = 0; t < 3; ++t) {
    if (sv[t + 1] - sv[t] < 1e-14) continue;
    const auto fs = [&](double s) {
      const auto sec = section_rule<double>(slice_tet(kTet, lam, s), R, 24, 48);
      return integrate(sec, [&](const Point2& p) { return zeta(p.norm(), R); });
    };
    oracle += integrate_adaptive<double>(fs, sv[t], sv[t + 1], 1e-13).value;
  }
  return oracle;
}

double zeta_rule_error(const Segment<double>& lam, double R, int n_lambda, double oracle) {
  const auto z = [&](const Point3& x) { return zeta(distance_and_projection(x, lam).distance, R); };
  const auto rule = enriched_tet_rule<double>(kTet, lam, R, QuadParams{n_lambda, 8, 16, 1.0, 3.0});
  return std::abs(integrate(rule, z) - oracle) / std::abs(oracle);
}

}  // namespace

TEST(EnrichedRule, ZetaOverTetAwayFromAxisIsSpectral) {
  const Segment<double> lam(Point3(0.6, 0.1, -1), Point3(0.6, 0.1, 1));
  const double oracle = zeta_slice_oracle(lam, 0.05);
  EXPECT_LT(zeta_rule_error(lam, 0.05, 12, oracle), 1e-12);
}

TEST(EnrichedRule, ZetaOverPiercedTetConvergesInLambda) {
  // Σ crosses section edges inside the vertex intervals, so f_ζ has kinks.
  const Segment<double> lam(Point3(0.1, 0.1, -1), Point3(0.1, 0.1, 1));
  const double oracle = zeta_slice_oracle(lam, 0.05);
  double prev = 1;
  for (int n : {3, 6, 12, 24, 48}) {
    const double err = zeta_rule_error(lam, 0.05, n, oracle);
    EXPECT_LT(err, prev) << n;
    prev = err;
  }
  EXPECT_LT(prev, 1e-7);
}
