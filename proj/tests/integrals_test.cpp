#include <gtest/gtest.h>

#include "micromorph/error.hpp"
#include "support.hpp"

using namespace micromorph;
using testing_support::Rng;

namespace {

// Monomial x^a y^b z^c.
double monomial(const Point& x, int a, int b, int c) {
  return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
}

// Exact integral of x^a y^b z^c over the unit sphere (Folland's formula);
// zero unless all exponents are even.
double sphere_moment(int a, int b, int c) {
  if (a % 2 || b % 2 || c % 2) return 0.0;
  const double ba = (a + 1) / 2.0, bb = (b + 1) / 2.0, bc = (c + 1) / 2.0;
  return 2.0 * std::tgamma(ba) * std::tgamma(bb) * std::tgamma(bc) / std::tgamma(ba + bb + bc);
}

PointFunction scalar(std::function<double(const Point&)> f) {
  return [f = std::move(f)](const Point& x) { return Tensor(0, {f(x)}); };
}

}  // namespace

TEST(GaussLegendre, TwoPointRule) {
  std::vector<double> x, w;
  gauss_legendre(2, x, w);
  ASSERT_EQ(x.size(), 2u);
  EXPECT_NEAR(std::abs(x[0]), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(x[0] + x[1], 0.0, 1e-15);
  EXPECT_NEAR(w[0] + w[1], 2.0, 1e-15);
}

TEST(GaussLegendre, ExactToDegreeTwoNMinusOne) {
  for (int n : {2, 5, 8, 13}) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int k = 0; k < n; ++k) q += w[k] * std::pow(x[k], p);
      EXPECT_NEAR(q, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussRadial, ExactToDegreeTwoNMinusOne) {
  for (int n : {1, 2, 4, 7, 12}) {
    std::vector<double> r, w;
    gauss_radial(n, r, w);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int k = 0; k < n; ++k) q += w[k] * std::pow(r[k], p);
      EXPECT_NEAR(q, 1.0 / (p + 3), 1e-14) << "n=" << n << " p=" << p;
    }
    for (double v : r) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(VolumeRule, BoxMonomials) {
  const int n = 4;
  QuadratureRule rule{Box{{-0.5, -0.2, -0.7}, {0.9, 1.1, 0.4}}, n, n};
  const auto pts = volume_points(rule);
  EXPECT_EQ(pts.size(), static_cast<std::size_t>(n * n * n));
  for (int a = 0; a <= 2 * n - 1; ++a) {
    for (int b = 0; a + b <= 2 * n - 1; b += 2) {
      const int c = 1;
      double q = 0.0;
      for (const auto& p : pts) q += p.weight * monomial(p.x, a, b, c);
      auto one = [](double lo, double hi, int e) { return (std::pow(hi, e + 1) - std::pow(lo, e + 1)) / (e + 1); };
      const double exact = one(-0.5, 0.9, a) * one(-0.2, 1.1, b) * one(-0.7, 0.4, c);
      EXPECT_NEAR(q, exact, 1e-14);
    }
  }
}

TEST(VolumeRule, UnitBoxAndBallVolumes) {
  double q = 0.0;
  for (const auto& p : volume_points({Box{{0, 0, 0}, {1, 1, 1}}, 3, 3})) q += p.weight;
  EXPECT_NEAR(q, 1.0, 1e-14);
  q = 0.0;
  for (const auto& p : volume_points({Ball{{0.3, -0.2, 0.1}, 1.0}, 3, 3})) q += p.weight;
  EXPECT_NEAR(q, 4.0 * std::numbers::pi / 3.0, 1e-14);
}

TEST(VolumeRule, BallMonomials) {
  const int n = 5;
  const auto pts = volume_points({Ball{{0, 0, 0}, 1.0}, n, n});
  for (int a = 0; a <= 2 * n - 1; ++a) {
    for (int b = 0; a + b <= 2 * n - 1; ++b) {
      for (int c = 0; a + b + c <= 2 * n - 1; ++c) {
        double q = 0.0;
        for (const auto& p : pts) q += p.weight * monomial(p.x, a, b, c);
        // radial factor: int_0^1 r^(a+b+c+2) dr
        const double exact = sphere_moment(a, b, c) / (a + b + c + 3);
        EXPECT_NEAR(q, exact, 1e-13) << a << " " << b << " " << c;
      }
    }
  }
}

TEST(SurfaceRule, SphereMonomials) {
  const int n = 6;
  const auto pts = surface_points({Ball{{0, 0, 0}, 1.0}, n, n});
  for (int a = 0; a <= 2 * n - 1; ++a) {
    for (int b = 0; a + b <= 2 * n - 1; ++b) {
      for (int c = 0; a + b + c <= 2 * n - 1; ++c) {
        double q = 0.0;
        for (const auto& p : pts) q += p.weight * monomial(p.x, a, b, c);
        EXPECT_NEAR(q, sphere_moment(a, b, c), 1e-13) << a << " " << b << " " << c;
      }
    }
  }
}

TEST(SurfaceIntegral, ConstantFluxHasNoNetOutflow) {
  const PointFunction constant = [](const Point&) { return Tensor(1, {0.3, -1.2, 2.0}); };
  for (const Region& g : {Region{Ball{{0.1, 0.2, 0.3}, 0.7}}, Region{Box{{-1, -0.5, 0}, {0.5, 1, 1}}}}) {
    const Tensor s = surface_integral(constant, {g, 4, 4});
    EXPECT_NEAR(s[0], 0.0, 1e-14);
  }
}

TEST(SurfaceIntegral, PositionFluxGivesThreeTimesVolume) {
  const PointFunction position = [](const Point& x) { return Tensor(1, {x[0], x[1], x[2]}); };
  const Tensor s = surface_integral(position, {Ball{{0, 0, 0}, 1.0}, 4, 4});
  EXPECT_NEAR(s[0], 4.0 * std::numbers::pi, 1e-13);
  const Tensor b = surface_integral(position, {Box{{0, 0, 0}, {1, 2, 0.5}}, 3, 3});
  EXPECT_NEAR(b[0], 3.0, 1e-14);
}

TEST(Integrals, DivergenceTheoremOnPolynomialFlux) {
  Rng rng(51);
  FieldSet::Vector v;
  for (auto& e : v) e = testing_support::random_polynomial(rng, 3);
  const FieldSet fs(v, {}, {}, {}, testing_support::unit_domain());
  const PointFunction flux = [&](const Point& x) { return fs.evaluate_jet(x).u.value; };
  const PointFunction div = [&](const Point& x) {
    const Tensor g = fs.evaluate_jet(x).u.gradient;
    return Tensor(0, {g(0, 0) + g(1, 1) + g(2, 2)});
  };
  for (const Region& g : {Region{Ball{{0.1, -0.2, 0.3}, 1.0}}, Region{Box{{-1, -1, -0.5}, {1, 0.5, 1}}}}) {
    const QuadratureRule rule{g, 6, 6};
    EXPECT_NEAR(surface_integral(flux, rule)[0], volume_integral(div, rule)[0], 1e-12);
  }
}

TEST(Integrals, GeometryOutsideDomainThrows) {
  const Region domain = testing_support::unit_domain();
  const PointFunction f = [](const Point&) { return Tensor(1); };
  EXPECT_THROW(surface_integral(f, {Ball{{1.0, 0, 0}, 1.0}, 4, 4}, &domain), DomainError);
  EXPECT_THROW(volume_integral(scalar([](const Point&) { return 1.0; }), {Box{{0, 0, 0}, {2, 1, 1}}, 4, 4}, &domain),
               DomainError);
  EXPECT_THROW(surface_integral(f, {Ball{{0, 0, 0}, 1.0}, 1, 4}), ShapeError);
}

TEST(Integrals, SurfaceAndVolumeAgreeOnManufacturedSolution) {
  Rng rng(52);
  const MaterialModel m = testing_support::random_material(rng, true);
  const Scenario sc = manufacture(m, testing_support::random_vector(rng, false),
                                  testing_support::random_matrix(rng, false), testing_support::unit_domain());
  const QuadratureRule rule{Ball{{0.1, 0.0, -0.1}, 1.0}, 12, 12};
  const IntegralReport r = compute_integrals(sc.fields, m, rule, ScalingDims{});
  EXPECT_LE(r.J.discrepancy, 1e-6);
  EXPECT_LE(r.L.discrepancy, 1e-6);
  EXPECT_LE(r.M.discrepancy, 1e-6);
  // compute_integrals matches the single-integral entry points
  EXPECT_LE(max_abs_difference(r.J.surface, j_integral(sc.fields, m, rule).surface), 1e-12);
  EXPECT_LE(max_abs_difference(r.L.volume, l_integral(sc.fields, m, rule).volume), 1e-12);
  EXPECT_LE(max_abs_difference(r.M.surface, m_integral(sc.fields, m, rule, ScalingDims{}).surface), 1e-12);
}

TEST(Integrals, PathIndependenceForScenarioA) {
  const Scenario a = builtin_scenario("a");
  const ScalingDims dims = a.dims;
  const IntegralReport r1 = compute_integrals(a.fields, a.material, {Ball{{0, 0, 0}, 0.8}, 12, 12}, dims);
  const IntegralReport r2 = compute_integrals(a.fields, a.material, {Ball{{0.3, -0.2, 0.1}, 0.8}, 12, 12}, dims);
  // J and L vanish on any closed surface; M picks up -int kappa:m.
  EXPECT_LE(max_abs(r1.J.surface), 1e-10);
  EXPECT_LE(max_abs(r2.J.surface), 1e-10);
  EXPECT_LE(max_abs(r1.L.surface), 1e-10);
  EXPECT_LE(max_abs(r2.L.surface), 1e-10);
  EXPECT_NEAR(r1.M.surface[0], r1.kappa_m_volume, 1e-10 * std::max(1.0, std::abs(r1.kappa_m_volume)));
}

TEST(Integrals, ResultsDoNotDependOnThreadCount) {
  const Scenario d = builtin_scenario("d");
  set_evaluation_threads(1);
  const IntegralReport one = compute_integrals(d.fields, d.material, d.rule, d.dims);
  set_evaluation_threads(4);
  const IntegralReport four = compute_integrals(d.fields, d.material, d.rule, d.dims);
  set_evaluation_threads(0);
  EXPECT_EQ(max_abs_difference(one.J.surface, four.J.surface), 0.0);
  EXPECT_EQ(max_abs_difference(one.M.volume, four.M.volume), 0.0);
  EXPECT_EQ(one.kappa_m_volume, four.kappa_m_volume);
}

TEST(Describe, Regions) {
  EXPECT_NE(describe(Ball{{0, 0, 0}, 1.0}).find("ball"), std::string::npos);
  EXPECT_NE(describe(Box{{0, 0, 0}, {1, 1, 1}}).find("box"), std::string::npos);
}
