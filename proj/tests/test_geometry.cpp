#include "fkm/focal.hpp"
#include "fkm/polynomial.hpp"

#include <gtest/gtest.h>

using namespace fkm;

class Geometry : public ::testing::TestWithParam<Side> {};

TEST_P(Geometry, CartanMunznerExactAtRationalPoints) {
  auto poly = fkm_polynomial<Rational>(GetParam());
  Rng rng(1);
  auto r = verify_cartan_munzner(poly, 10, rng);
  EXPECT_EQ(r.gradient, 0.0);
  EXPECT_EQ(r.laplacian, 0.0);
}

TEST_P(Geometry, CartanMunznerFloat) {
  auto poly = fkm_polynomial<double>(GetParam());
  Rng rng(2);
  EXPECT_LT(verify_cartan_munzner(poly, 200, rng).max(), 1e-9);
}

TEST_P(Geometry, MinusFrameAndSpectrum) {
  auto poly = fkm_polynomial<double>(GetParam());
  const auto& sys = poly.system;
  Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    VecD x = sample_clifford_stiefel(sys, rng);
    EXPECT_LT(clifford_stiefel_residual(sys, x), 1e-13);
    EXPECT_NEAR(poly.eval(x), -1.0, 1e-13);
    auto f = focal_frame_at(sys, x, VecD(rng.unit_vector(9)));
    EXPECT_LT(frame_gram_residual(f), 1e-12);
    EXPECT_EQ(f.tangent_dim(), 22);
    MatD s = shape_operator(f, VecD(rng.unit_vector(9)));
    EXPECT_LT(max_abs(MatD(s * s * s - s)), 1e-10);
    // Independent spectrum count from a symmetric eigensolver.
    auto e = eigen_symmetric(s);
    int plus = 0, minus = 0, zero = 0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      double v = e.values(i);
      (std::abs(v - 1) < 1e-8 ? plus : std::abs(v + 1) < 1e-8 ? minus : zero) += 1;
    }
    EXPECT_EQ(plus, 7);
    EXPECT_EQ(minus, 7);
    EXPECT_EQ(zero, 8);
  }
}

TEST_P(Geometry, PlusFrameAndSpectrum) {
  auto poly = fkm_polynomial<double>(GetParam());
  const auto& sys = poly.system;
  Rng rng(4);
  for (int k = 0; k < 5; ++k) {
    auto f = random_plus_frame(sys, rng);
    EXPECT_NEAR(poly.eval(f.x), 1.0, 1e-12);
    EXPECT_LT(frame_gram_residual(f), 1e-12);
    MatD s = shape_operator(f, VecD(rng.unit_vector(8)));
    auto mu = cube_multiplicities(s, 1e-8);
    EXPECT_EQ(mu, (std::array<Eigen::Index, 3>{8, 8, 7}));
  }
}

INSTANTIATE_TEST_SUITE_P(Families, Geometry, ::testing::Values(Side::left, Side::right, Side::mixed));

TEST(Geometry, PerturbedPolynomialFailsCartanMunzner) {
  auto poly = fkm_polynomial<double>(Side::left);
  poly.quartic_coeff = -1.01;
  Rng rng(5);
  EXPECT_GT(verify_cartan_munzner(poly, 20, rng).max(), 1e-3);
}

TEST(Geometry, ExactMinusFrame) {
  auto sys = fkm_system<Rational>(Side::left);
  Rng rng(6);
  VecQ x = sample_clifford_stiefel_exact(sys, rng);
  EXPECT_EQ(clifford_stiefel_residual(sys, x), 0.0);
  VecQ w = rational_unit_vector(9, rng);
  EXPECT_EQ(w.squaredNorm(), Rational(1));
  auto f = focal_frame_at(sys, x, w);
  MatQ s = shape_operator(f, rational_unit_vector(9, rng));
  EXPECT_EQ(max_abs(MatQ(s * s * s - s)), 0.0);
  EXPECT_EQ(cube_multiplicities(s), (std::array<Eigen::Index, 3>{7, 7, 8}));
}

TEST(Geometry, HouseholderIsSymmetricOrthogonal) {
  VecQ v(3);
  v << 1, 2, 2;
  MatQ h = householder(v);
  EXPECT_EQ(MatQ(h * h), MatQ(MatQ::Identity(3, 3)));
  EXPECT_EQ(h, MatQ(h.transpose()));
}

TEST(Geometry, FrameRejectsBadInput) {
  auto sys = fkm_system<double>(Side::left);
  Rng rng(7);
  VecD off = rng.unit_vector(32);
  EXPECT_THROW(focal_frame_at(sys, off, VecD(VecD::Unit(9, 0))), std::invalid_argument);
  VecD x = sample_clifford_stiefel(sys, rng);
  EXPECT_THROW(focal_frame_at(sys, x, VecD(2 * VecD::Unit(9, 0))), std::invalid_argument);
  EXPECT_THROW(focal_frame_at(sys, x, VecD(VecD::Unit(8, 0))), std::invalid_argument);
  auto fp = random_plus_frame(sys, rng);
  EXPECT_THROW(plus_frame_at(sys, fp.x, VecD(fp.Ep.col(0))), std::invalid_argument);
}

TEST(Geometry, ShapeOperatorNeedsUnitNormal) {
  auto sys = fkm_system<double>(Side::right);
  Rng rng(8);
  auto f = focal_frame_at(sys, sample_clifford_stiefel(sys, rng), VecD(VecD::Unit(9, 0)));
  EXPECT_THROW(shape_operator(f, VecD(2 * VecD::Unit(9, 1))), std::invalid_argument);
}

TEST(Geometry, AmbientOperatorMatchesTangentOperator) {
  auto sys = fkm_system<double>(Side::left);
  Rng rng(9);
  auto f = focal_frame_at(sys, sample_clifford_stiefel(sys, rng), VecD(rng.unit_vector(9)));
  VecD c = rng.unit_vector(9);
  MatD t = f.tangent();
  MatD amb = ambient_shape_operator(f, c);
  EXPECT_LT(max_abs(MatD(t.transpose() * amb * t - shape_operator(f, c))), 1e-12);
}
