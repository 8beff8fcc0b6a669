#include "fkm/linalg.hpp"
#include "fkm/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace fkm;

TEST(Scalar, ParseModes) {
  EXPECT_EQ(parse_scalar_mode("exact"), ScalarMode::exact);
  EXPECT_EQ(parse_scalar_mode("float64"), ScalarMode::float64);
  EXPECT_THROW(parse_scalar_mode("float32"), std::invalid_argument);
  EXPECT_STREQ(to_string(ScalarMode::exact), "exact");
}

TEST(Scalar, TinyRationalIsNotZero) {
  Rational tiny(1);
  tiny /= Rational(mpz_class(1) << 2000);
  EXPECT_GT(magnitude(tiny), 0.0);
  EXPECT_FALSE(is_zero(tiny, 1.0));
  EXPECT_TRUE(is_zero(Rational(0), 0.0));
}

TEST(Scalar, MaxAbsPropagatesNaN) {
  MatD m = MatD::Zero(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(std::isnan(max_abs(m)));
  EXPECT_EQ(max_abs(MatD(0, 0)), 0.0);
}

TEST(Linalg, ExactRankAndKernel) {
  MatQ m(3, 4);
  m << 1, 2, 3, 4,
       2, 4, 6, 8,
       0, 1, Rational(1, 3), 0;
  EXPECT_EQ(rank(m), 2);
  MatQ k = kernel_basis(m);
  ASSERT_EQ(k.cols(), 2);
  EXPECT_EQ(max_abs(MatQ(m * k)), 0.0);
  EXPECT_EQ(rank(k), 2);
}

TEST(Linalg, RrefOfIdentityBlock) {
  MatQ m(2, 3);
  m << 2, 0, 4,
       0, 3, 6;
  Echelon e = rref(m);
  MatQ expect(2, 3);
  expect << 1, 0, 2,
            0, 1, 2;
  EXPECT_EQ(e.R, expect);
  EXPECT_EQ(e.pivots, (std::vector<Eigen::Index>{0, 1}));
}

TEST(Linalg, FloatKernelIsOrthonormal) {
  Rng rng(1);
  MatD a = rng.gaussian(3, 7);
  MatD k = kernel_basis(a);
  ASSERT_EQ(k.cols(), 4);
  EXPECT_LT(max_abs(MatD(a * k)), 1e-12);
  EXPECT_LT(max_abs(MatD(k.transpose() * k - MatD::Identity(4, 4))), 1e-12);
  EXPECT_EQ(rank(a), 3);
}

TEST(Linalg, RankThresholdIsRelative) {
  MatD a = MatD::Zero(3, 3);
  a(0, 0) = 1e6;
  a(1, 1) = 1e-2;
  EXPECT_EQ(rank(a, 1e-9), 2);
  a(1, 1) = 1e-4;
  EXPECT_EQ(rank(a, 1e-9), 1);
  EXPECT_EQ(rank(a, 1e-11), 2);
}

TEST(Linalg, SolveExact) {
  MatQ a(2, 2), b(2, 1);
  a << 1, 2, 3, 4;
  b << 5, 6;
  MatQ x = solve_exact(a, b);
  EXPECT_EQ(MatQ(a * x), b);
  MatQ s(2, 2);
  s << 1, 2, 2, 4;
  MatQ c(2, 1);
  c << 1, 0;
  EXPECT_THROW(solve_exact(s, c), std::runtime_error);
  EXPECT_THROW(inverse_exact(s), std::runtime_error);
  EXPECT_EQ(MatQ(inverse(a) * a), MatQ(MatQ::Identity(2, 2)));
}

TEST(Linalg, StackMismatchThrows) {
  EXPECT_THROW(vstack<double>({MatD::Zero(1, 2), MatD::Zero(1, 3)}), std::invalid_argument);
  EXPECT_THROW(hstack<double>({MatD::Zero(2, 1), MatD::Zero(3, 1)}), std::invalid_argument);
  EXPECT_THROW(joint_kernel<double>({}), std::invalid_argument);
}

TEST(Linalg, JointKernel) {
  MatD a = MatD::Zero(1, 3), b = MatD::Zero(1, 3);
  a(0, 0) = 1;
  b(0, 1) = 1;
  MatD k = joint_kernel<double>({a, b});
  ASSERT_EQ(k.cols(), 1);
  EXPECT_NEAR(std::abs(k(2, 0)), 1.0, 1e-14);
}

TEST(Linalg, SymmetricEigenSortedAndChecked) {
  MatD m(3, 3);
  m << 2, 1, 0,
       1, 2, 0,
       0, 0, -1;
  auto e = eigen_symmetric(m);
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  EXPECT_NEAR(e.values(2), -1.0, 1e-14);
  EXPECT_LT(max_abs(MatD(m * e.vectors - e.vectors * e.values.asDiagonal())), 1e-13);
  m(0, 1) = 5;
  EXPECT_THROW(eigen_symmetric(m), std::invalid_argument);
}

TEST(Linalg, CubeMultiplicities) {
  Rng rng(2);
  MatD q = rng.orthogonal(5);
  VecD d(5);
  d << 1, 1, -1, 0, 0;
  MatD m = q * d.asDiagonal() * q.transpose();
  auto mu = cube_multiplicities(m);
  EXPECT_EQ(mu, (std::array<Eigen::Index, 3>{2, 1, 2}));
  MatQ e = MatQ::Zero(3, 3);
  e(0, 0) = -1;
  EXPECT_EQ(cube_multiplicities(e), (std::array<Eigen::Index, 3>{0, 1, 2}));
  EXPECT_THROW(cube_multiplicities(MatD(2 * MatD::Identity(2, 2))), std::invalid_argument);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  Rng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  double x = a.normal();
  EXPECT_EQ(x, b.normal());
  EXPECT_NE(x, c.normal());
  EXPECT_NE(x, d.normal());
  EXPECT_NE(derive_seed(0, 0), derive_seed(0, 1));
}

TEST(Rng, OrthogonalIsOrthogonal) {
  Rng rng(3);
  MatD q = rng.orthogonal(6);
  EXPECT_LT(max_abs(MatD(q.transpose() * q - MatD::Identity(6, 6))), 1e-13);
}
