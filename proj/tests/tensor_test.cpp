#include <gtest/gtest.h>

#include "micromorph/error.hpp"
#include "support.hpp"

using namespace micromorph;
using testing_support::Rng;
using testing_support::random_rotation;
using testing_support::random_tensor;

TEST(Tensor, OffsetConventionIsRowMajor) {
  Tensor t(3);
  t(1, 2, 0) = 5.0;
  EXPECT_EQ(t[1 * 9 + 2 * 3 + 0], 5.0);
  const int idx[] = {1, 2, 0};
  EXPECT_EQ(t.at(idx), 5.0);
  EXPECT_EQ(Tensor(6).size(), 729u);
}

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(Tensor(7), ShapeError);
  EXPECT_THROW(Tensor(2, std::vector<double>(8, 0.0)), ShapeError);
  EXPECT_THROW(Tensor(1, {1.0, NAN, 0.0}), ShapeError);
  const int idx[] = {0, 3};
  EXPECT_THROW(Tensor(2).at(idx), ShapeError);
}

TEST(Contract, DeltaIdentities) {
  const Tensor d = kronecker_delta();
  EXPECT_EQ(max_abs_difference(contract(d, d, {{1, 0}}), d), 0.0);
  const Tensor tr = contract(d, d, {{0, 0}, {1, 1}});
  EXPECT_EQ(tr.rank(), 0);
  EXPECT_DOUBLE_EQ(tr[0], 3.0);
}

TEST(Contract, EmptyPairingIsOuterProduct) {
  Rng rng(1);
  const Tensor a = random_tensor(1, rng);
  const Tensor b = random_tensor(1, rng);
  const Tensor c = contract(a, b, {});
  ASSERT_EQ(c.rank(), 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(c(i, j), a[i] * b[j]);
  }
}

TEST(Contract, FreeSlotOrderMatchesLoops) {
  Rng rng(2);
  const Tensor a = random_tensor(3, rng);
  const Tensor b = random_tensor(3, rng);
  // c_im = a_ijk b_kjm
  const Tensor c = contract(a, b, {{1, 1}, {2, 0}});
  ASSERT_EQ(c.rank(), 2);
  for (int i = 0; i < 3; ++i) {
    for (int m = 0; m < 3; ++m) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) v += a(i, j, k) * b(k, j, m);
      }
      EXPECT_NEAR(c(i, m), v, 1e-14);
    }
  }
}

TEST(Contract, InvalidSlotThrows) {
  const Tensor d = kronecker_delta();
  EXPECT_THROW(contract(d, d, {{2, 0}}), ShapeError);
  EXPECT_THROW(contract(d, d, {{0, 0}, {0, 1}}), ShapeError);
}

TEST(Contract, IsBilinear) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = random_tensor(4, rng), b = random_tensor(4, rng), c = random_tensor(3, rng);
    const double alpha = rng.uniform(), beta = rng.uniform();
    const std::initializer_list<SlotPair> p = {{2, 0}, {3, 2}};
    const Tensor lhs = contract(alpha * a + beta * b, c, p);
    const Tensor rhs = alpha * contract(a, c, p) + beta * contract(b, c, p);
    EXPECT_LE(testing_support::rel_diff(lhs, rhs), 1e-12);
  }
}

TEST(Symmetry, MajorSymmetryOfDeltaProduct) {
  const Tensor d = kronecker_delta();
  const Tensor dd = outer(d, d);
  EXPECT_TRUE(check_symmetry(dd, SymmetrySpec::blocks({0, 1}, {2, 3}), 1e-14));
  Tensor bad = dd;
  bad(0, 1, 2, 2) += 10 * 1e-9;
  EXPECT_FALSE(check_symmetry(bad, SymmetrySpec::blocks({0, 1}, {2, 3}), 1e-9));
}

TEST(Symmetry, PairExchangeOfMatrixIsTransposeAverage) {
  Rng rng(4);
  const Tensor t = random_tensor(2, rng);
  const Tensor s = symmetrize(t, SymmetrySpec::pair(0, 1));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(s(i, j), 0.5 * (t(i, j) + t(j, i)), 1e-15);
  }
}

TEST(Symmetry, SymmetrizeThenCheckRoundTrip) {
  Rng rng(5);
  const SymmetrySpec b_spec = SymmetrySpec::blocks({0, 1}, {2, 3}).with_pair(0, 1).with_pair(2, 3);
  const Tensor b = symmetrize(random_tensor(4, rng), b_spec);
  EXPECT_TRUE(check_symmetry(b, b_spec, 1e-15));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          EXPECT_NEAR(b(i, j, k, l), b(k, l, i, j), 1e-15);
          EXPECT_NEAR(b(i, j, k, l), b(j, i, k, l), 1e-15);
          EXPECT_NEAR(b(i, j, k, l), b(i, j, l, k), 1e-15);
        }
      }
    }
  }

  const SymmetrySpec c_spec = SymmetrySpec::blocks({0, 1, 2}, {3, 4, 5});
  const Tensor c = symmetrize(random_tensor(6, rng), c_spec);
  for (int i = 0; i < 3; ++i) {
    for (int n = 0; n < 3; ++n) EXPECT_EQ(c(i, 0, 1, 2, n, 1), c(2, n, 1, i, 0, 1));
  }
}

TEST(Symmetry, SymmetrizeIsIdempotent) {
  Rng rng(6);
  const SymmetrySpec spec = SymmetrySpec::blocks({0, 1}, {2, 3}).with_pair(0, 1).with_pair(2, 3);
  const Tensor once = symmetrize(random_tensor(4, rng), spec);
  const Tensor twice = symmetrize(once, spec);
  EXPECT_LE(max_abs_difference(once, twice), 1e-15);
}

TEST(IsotropicBasis, CountsAndOrder) {
  const auto b4 = isotropic_basis(4);
  ASSERT_EQ(b4.size(), 3u);
  const Tensor d = kronecker_delta();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          EXPECT_EQ(b4[0](i, j, k, l), d(i, j) * d(k, l));
          EXPECT_EQ(b4[1](i, j, k, l), d(i, k) * d(j, l));
          EXPECT_EQ(b4[2](i, j, k, l), d(i, l) * d(j, k));
        }
      }
    }
  }
  EXPECT_EQ(isotropic_basis(6).size(), 15u);
  EXPECT_THROW(isotropic_basis(5), ShapeError);
}

TEST(IsotropicBasis, RotationInvariant) {
  Rng rng(7);
  std::vector<Tensor> all = isotropic_basis(4);
  for (auto& t : isotropic_basis(6)) all.push_back(t);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor R = random_rotation(rng);
    for (const Tensor& t : all) ASSERT_LE(max_abs_difference(rotate(t, R), t), 1e-10);
  }
}

TEST(Rotate, IdentityAndHalfTurn) {
  Rng rng(8);
  const Tensor t = random_tensor(3, rng);
  EXPECT_LE(max_abs_difference(rotate(t, kronecker_delta()), t), 0.0);
  const Tensor v(1, {1.0, 2.0, 3.0});
  const Tensor r = rotate(v, rotation_about_axis({0, 0, 1}, std::numbers::pi));
  EXPECT_NEAR(r[0], -1.0, 1e-15);
  EXPECT_NEAR(r[1], -2.0, 1e-15);
  EXPECT_NEAR(r[2], 3.0, 1e-15);
}

TEST(Rotate, PreservesNormAndComposes) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor t = random_tensor(4, rng);
    const Tensor R1 = random_rotation(rng), R2 = random_rotation(rng);
    EXPECT_NEAR(frobenius_norm(rotate(t, R1)), frobenius_norm(t), 1e-12);
    const Tensor lhs = rotate(rotate(t, R1), R2);
    const Tensor rhs = rotate(t, testing_support::matmul(R2, R1));
    EXPECT_LE(max_abs_difference(lhs, rhs), 1e-12);
  }
}

TEST(Rotate, RejectsNonOrthogonal) {
  Tensor R = kronecker_delta();
  R(0, 1) = 0.1;
  EXPECT_THROW(rotate(kronecker_delta(), R), NumericError);
}

TEST(LeviCivita, Entries) {
  const Tensor e = levi_civita();
  EXPECT_EQ(e(0, 1, 2), 1.0);
  EXPECT_EQ(e(1, 0, 2), -1.0);
  EXPECT_EQ(e(2, 0, 1), 1.0);
  EXPECT_EQ(e(0, 0, 1), 0.0);
}
