#include "fkm/octonion.hpp"
#include "fkm/rng.hpp"

#include <gtest/gtest.h>

using namespace fkm;

namespace {

Octonion<double> random_octonion(Rng& rng) { return to_octonion(VecD(rng.gaussian(8))); }

double norm2(const Octonion<double>& o) { return to_vec(o).squaredNorm(); }

}  // namespace

TEST(Octonion, ImaginaryUnitsSquareToMinusOne) {
  for (int a = 1; a < 8; ++a) {
    auto e = oct_basis<Rational>(a);
    auto sq = oct_mul(e, e);
    EXPECT_EQ(sq[0], Rational(-1));
    for (int k = 1; k < 8; ++k) EXPECT_EQ(sq[k], Rational(0));
  }
}

TEST(Octonion, UnitIsIdentity) {
  Rng rng(1);
  auto x = random_octonion(rng);
  auto one = oct_basis<double>(0);
  EXPECT_EQ(to_vec(oct_mul(one, x)), to_vec(x));
  EXPECT_EQ(to_vec(oct_mul(x, one)), to_vec(x));
}

TEST(Octonion, NormIsMultiplicative) {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    auto x = random_octonion(rng), y = random_octonion(rng);
    EXPECT_NEAR(norm2(oct_mul(x, y)), norm2(x) * norm2(y), 1e-10 * norm2(x) * norm2(y));
  }
}

TEST(Octonion, AlternativeButNotAssociative) {
  Rng rng(3);
  auto x = random_octonion(rng), y = random_octonion(rng), z = random_octonion(rng);
  VecD l = to_vec(oct_mul(x, oct_mul(x, y))), r = to_vec(oct_mul(oct_mul(x, x), y));
  EXPECT_LT((l - r).norm(), 1e-10);
  VecD a = to_vec(oct_mul(oct_mul(x, y), z)), b = to_vec(oct_mul(x, oct_mul(y, z)));
  EXPECT_GT((a - b).norm(), 1e-3);
}

TEST(Octonion, MultMatrixOrthogonalAndSkew) {
  for (Side s : {Side::left, Side::right}) {
    for (int a = 0; a < 8; ++a) {
      MatQ m = mult_matrix<Rational>(a, s);
      EXPECT_EQ(MatQ(m.transpose() * m), MatQ(MatQ::Identity(8, 8)));
      if (a >= 1) {
        EXPECT_EQ(MatQ(m + m.transpose()), MatQ(MatQ::Zero(8, 8)));
        EXPECT_EQ(MatQ(m * m), MatQ(-MatQ::Identity(8, 8)));
      }
    }
  }
  EXPECT_THROW(mult_matrix<double>(8, Side::left), std::out_of_range);
  EXPECT_THROW(mult_matrix<double>(1, Side::mixed), std::invalid_argument);
}

TEST(Octonion, MultMatrixMatchesProduct) {
  Rng rng(4);
  auto y = random_octonion(rng);
  for (int a = 0; a < 8; ++a) {
    VecD l = mult_matrix<double>(a, Side::left) * to_vec(y);
    VecD r = mult_matrix<double>(a, Side::right) * to_vec(y);
    EXPECT_LT((l - to_vec(oct_mul(oct_basis<double>(a), y))).norm(), 1e-14);
    EXPECT_LT((r - to_vec(oct_mul(y, oct_basis<double>(a)))).norm(), 1e-14);
  }
}

TEST(Quaternion, HamiltonRules) {
  Quaternion<double> i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  EXPECT_EQ(quat_mul(i, j), k);
  EXPECT_EQ(quat_mul(j, k), i);
  EXPECT_EQ(quat_mul(k, i), j);
  EXPECT_EQ(quat_mul(j, i), (Quaternion<double>{0, 0, 0, -1}));
}

TEST(Hurwitz, ClassicalMultiplicationsPassExactly) {
  Rng rng(5);
  auto q = verify_orthogonal_multiplication(quaternion_multiplication<Rational>(), 10, rng);
  EXPECT_TRUE(q.pass());
  EXPECT_EQ(q.hurwitz_residual, 0.0);
  for (Side s : {Side::left, Side::right}) {
    auto o = verify_orthogonal_multiplication(octonion_multiplication<Rational>(s), 10, rng);
    EXPECT_TRUE(o.pass());
    EXPECT_EQ(o.composition_residual, 0.0);
  }
}

TEST(Hurwitz, PerturbedMultiplicationFailsBothTests) {
  Rng rng(6);
  auto om = octonion_multiplication<double>(Side::left);
  om.F[3](2, 5) += 0.1;
  auto v = verify_orthogonal_multiplication(om, 50, rng);
  EXPECT_FALSE(v.hurwitz_pass);
  EXPECT_FALSE(v.composition_pass);
  EXPECT_TRUE(v.agree());
}

TEST(Hurwitz, DimensionMismatchThrows) {
  Rng rng(7);
  auto om = quaternion_multiplication<double>();
  om.r = 5;
  EXPECT_THROW(verify_orthogonal_multiplication(om, 1, rng), std::invalid_argument);
}
