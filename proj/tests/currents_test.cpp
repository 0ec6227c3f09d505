#include <gtest/gtest.h>

#include "micromorph/error.hpp"
#include "support.hpp"

using namespace micromorph;
using testing_support::Rng;
using testing_support::rel_diff;

namespace {

PointState<double> random_state(Rng& rng, bool inhomogeneous = true) {
  const MaterialModel m = testing_support::random_material(rng, inhomogeneous);
  const FieldSet fs = testing_support::random_fields(rng);
  return sample_point(fs, m, testing_support::random_point(rng)).state;
}

Tensor row(const Tensor& t, int k) { return Tensor(1, {t(k, 0), t(k, 1), t(k, 2)}); }

// -dW/dx_k with u, phi and their gradients frozen at x; only the material and
// the prescribed sources move.
Tensor frozen_force_fd(const FieldSet& fs, const MaterialModel& m, const Point& x, double h = 1e-5) {
  const FieldArgs<double> frozen = field_args(fs.evaluate_jet(x), x);
  const StrainState<double> st = strains(frozen);
  auto w = [&](const Point& y) {
    const JetBundle j = fs.evaluate_jet(y);
    return elastic_energy(st, stresses(m.evaluate(y), st)) +
           source_energy(frozen.u, frozen.phi, j.force.value, j.couple.value);
  };
  Tensor f(1);
  for (int k = 0; k < 3; ++k) {
    Point xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    f[k] = -(w(xp) - w(xm)) / (xp[k] - xm[k]);
  }
  return f;
}

}  // namespace

TEST(AngularMomentum, TotalIsOrbitalPlusSpin) {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto am = angular_momentum(random_state(rng));
    EXPECT_LE(max_abs_difference(am.total, am.orbital + am.spin), 1e-14 * std::max(1.0, max_abs(am.total)));
  }
}

TEST(GeneralFlux, ReproducesTheThreeCurrents) {
  Rng rng(42);
  const ScalingDims dims = ScalingDims::for_dimension(3);
  for (int trial = 0; trial < 10; ++trial) {
    const PointState<double> ps = random_state(rng);
    const Tensor P = eshelby_stress(ps);
    const Tensor M = angular_momentum(ps).total;
    const Tensor Y = scaling_flux(ps, dims);
    const auto tr = general_flux(GeneratorTriple::translation(), ps);
    const auto rot = general_flux(GeneratorTriple::rotation(), ps);
    const auto sc = general_flux(GeneratorTriple::scaling(dims), ps);
    ASSERT_EQ(tr.size(), 3u);
    ASSERT_EQ(rot.size(), 3u);
    ASSERT_EQ(sc.size(), 1u);
    for (int k = 0; k < 3; ++k) {
      EXPECT_LE(rel_diff(tr[k], row(P, k)), 1e-12);
      EXPECT_LE(rel_diff(rot[k], row(M, k)), 1e-12);
    }
    EXPECT_LE(rel_diff(sc[0], Y), 1e-12);
  }
}

TEST(CanonicalForm, AgreesWithStressForm) {
  Rng rng(43);
  const ScalingDims dims = ScalingDims::for_dimension(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PointState<double> ps = random_state(rng);
    const EnergyPartials d = energy_partials(ps);
    EXPECT_LE(rel_diff(d.d_grad_u, ps.stress.t), 1e-14);
    EXPECT_LE(rel_diff(d.d_grad_phi, ps.stress.m), 1e-14);
    EXPECT_LE(rel_diff(eshelby_stress_canonical(ps, d), eshelby_stress(ps)), 1e-14);
    EXPECT_LE(rel_diff(angular_momentum_canonical(ps, d), angular_momentum(ps).total), 1e-14);
    EXPECT_LE(rel_diff(scaling_flux_canonical(ps, d, dims), scaling_flux(ps, dims)), 1e-14);
  }
}

TEST(ScalingDims, ForDimension) {
  const ScalingDims d3 = ScalingDims::for_dimension(3);
  EXPECT_EQ(d3.d_u, -0.5);
  EXPECT_EQ(d3.d_phi, -1.5);
  const ScalingDims d2 = ScalingDims::for_dimension(2);
  EXPECT_EQ(d2.d_u, 0.0);
  EXPECT_EQ(d2.d_phi, -1.0);
  EXPECT_EQ(d2.n, 2);
}

TEST(Sources, ZeroFieldsGiveZeroSources) {
  Rng rng(44);
  const MaterialModel m = testing_support::random_material(rng, true);
  const FieldSet fs({}, {}, {}, {}, testing_support::unit_domain());
  const PointSample s = sample_point(fs, m, {0.3, 0.2, 0.1});
  EXPECT_EQ(max_abs(inhomogeneity_force(s)), 0.0);
  EXPECT_EQ(max_abs(rotational_source(s)), 0.0);
  EXPECT_EQ(scaling_source(s, ScalingDims{}), 0.0);
}

TEST(Sources, HomogeneousSourceFreeScalingIsMinusKappaM) {
  Rng rng(45);
  const MaterialModel m = testing_support::random_material(rng, false);
  const FieldSet fs(testing_support::random_vector(rng, true), testing_support::random_matrix(rng, true), {}, {},
                    testing_support::unit_domain());
  const PointSample s = sample_point(fs, m, {-0.4, 0.3, 0.5});
  EXPECT_EQ(max_abs(inhomogeneity_force(s)), 0.0);
  double km = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) km += s.state.strain.kappa(a, b, c) * s.state.stress.m(a, b, c);
    }
  }
  EXPECT_NEAR(scaling_source(s, ScalingDims{}), -km, 1e-12 * std::max(1.0, std::abs(km)));
}

TEST(Sources, IsotropyBracketVanishesForIsotropicMedia) {
  Rng rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    IsotropicSpec spec = testing_support::random_isotropic_spec(rng);
    spec.profile_A = Expression(1.0) + Expression(0.2) * Expression::variable(0);
    const MaterialModel m = make_isotropic(spec);
    const FieldSet fs = testing_support::random_fields(rng);
    const PointSample s = sample_point(fs, m, testing_support::random_point(rng));
    EXPECT_LE(max_abs(isotropy_bracket(s.state)), 1e-10);
  }
}

TEST(Sources, IsotropyBracketIsNonzeroForAnisotropicMedia) {
  Rng rng(47);
  EXPECT_GT(max_abs(isotropy_bracket(random_state(rng))), 1e-3);
}

TEST(Sources, InhomogeneityForceMatchesFrozenArgumentDifference) {
  Rng rng(48);
  for (int trial = 0; trial < 10; ++trial) {
    const MaterialModel m = testing_support::random_material(rng, true);
    const FieldSet fs = testing_support::random_fields(rng);
    const Point x = testing_support::random_point(rng);
    const Tensor exact = inhomogeneity_force(sample_point(fs, m, x));
    EXPECT_LE(rel_diff(exact, frozen_force_fd(fs, m, x)), 1e-7);
  }
}

TEST(Balance, ExactResidualsVanishOnSolutions) {
  Rng rng(49);
  const ScalingDims dims = ScalingDims::for_dimension(3);
  for (int trial = 0; trial < 4; ++trial) {
    const MaterialModel m = testing_support::random_material(rng, true);
    const Scenario sc = manufacture(m, testing_support::random_vector(rng, true),
                                    testing_support::random_matrix(rng, true), testing_support::unit_domain());
    for (int k = 0; k < 5; ++k) {
      const Point x = testing_support::random_point(rng, 1.3);
      const BalanceResiduals exact = balance_residuals(sc.fields, m, x, dims);
      EXPECT_FALSE(exact.not_a_solution);
      EXPECT_LE(exact.max_norm(), 1e-8);
      const BalanceResiduals fd = balance_residuals_fd(sc.fields, m, x, dims);
      EXPECT_LE(fd.max_norm(), 1e-5);
    }
  }
}

TEST(Balance, NonSolutionsAreFlagged) {
  Rng rng(50);
  const MaterialModel m = testing_support::random_material(rng, true);
  const FieldSet fs = testing_support::random_fields(rng);
  const BalanceResiduals r = balance_residuals(fs, m, {0.1, 0.1, 0.1}, ScalingDims{});
  EXPECT_TRUE(r.not_a_solution);
  EXPECT_GT(r.el_residual, 1e-8);
}
