#include "fkm/normalization.hpp"
#include "fkm/suites.hpp"

#include <gtest/gtest.h>

using namespace fkm;

namespace {

SecondFormTensor<double> fkm_tensor(Side side, Rng& rng) {
  return block_decompose(random_plus_frame(fkm_system<double>(side), rng));
}

}  // namespace

TEST(Normalization, FkmPairsNormalize) {
  Rng rng(1);
  for (Side side : {Side::left, Side::right}) {
    auto t = fkm_tensor(side, rng);
    for (int k = 0; k < 3; ++k) {
      auto tp = random_pair(t, rng);
      auto np = normalize_pair(tp);
      EXPECT_EQ(np.data.r, 4);
      EXPECT_EQ(r_lambda(tp), 4);
      EXPECT_LT(normal_form_residual(np), 1e-9);
      EXPECT_LT(np.data.delta_skew, 1e-9);
      EXPECT_LT(verify_ot_identities(np.tensor).max(), 1e-12);
      // sigma = s I and Delta = f J with f^2 + 2 s^2 = 1.
      const double s = np.data.sigma(0);
      EXPECT_LT((np.data.sigma.array() - s).abs().maxCoeff(), 1e-9);
      ASSERT_EQ(np.data.blocks.size(), 2u);
      for (double f : np.data.blocks) EXPECT_NEAR(f * f + 2 * s * s, 1.0, 1e-9);
    }
  }
}

TEST(Normalization, MixedFamilyHasRankSix) {
  Rng rng(2);
  auto t = fkm_tensor(Side::mixed, rng);
  EXPECT_EQ(normalize_pair(random_pair(t, rng)).data.r, 6);
}

TEST(Normalization, RecoversSyntheticSpectralData) {
  Rng rng(3);
  VecD sigma(4);
  sigma << 0.9, 0.9, 0.4, 0.4;
  MatD delta = MatD::Zero(4, 4);
  delta(0, 1) = 0.3;
  delta(1, 0) = -0.3;
  delta(2, 3) = 0.6;
  delta(3, 2) = -0.6;
  auto t = synthetic_pair_tensor(sigma, delta, 2, false, rng);
  auto hidden = change_bases(t, rng.orthogonal(8), rng.orthogonal(8), rng.orthogonal(7));
  auto np = normalize_pair(hidden);
  EXPECT_EQ(np.data.r, 4);
  EXPECT_NEAR(np.data.sigma(0), 0.9, 1e-12);
  EXPECT_NEAR(np.data.sigma(3), 0.4, 1e-12);
  std::vector<double> fs = np.data.blocks;
  std::sort(fs.begin(), fs.end());
  ASSERT_EQ(fs.size(), 2u);
  EXPECT_NEAR(fs[0], 0.3, 1e-12);
  EXPECT_NEAR(fs[1], 0.6, 1e-12);
  EXPECT_LT(normal_form_residual(np), 1e-12);
}

TEST(Normalization, RejectsInvalidSecondForm) {
  Rng rng(4);
  auto t = fkm_tensor(Side::left, rng);
  t.C[0] *= 2.0;
  EXPECT_THROW(normalize_pair(t), std::invalid_argument);
}

TEST(Nullity, BlockAndDefinitionTestsAgreeOnSyntheticTensors) {
  auto sys = fkm_system<double>(Side::left);
  Rng rng(5);
  std::vector<NormalizedPair> bases;
  for (int k = 0; k < 5; ++k) bases.push_back(random_fkm_pair(sys, rng));
  int nulls = 0, nonnulls = 0;
  for (int k = 0; k < 200; ++k) {
    int target = -1;
    auto np = equivalence_sample(bases[k % bases.size()], k % 2 == 1, rng, target);
    for (int l = 2; l <= np.tensor.count(); ++l) {
      const bool block = is_r_null_block(np.tensor, l, np.data.r);
      EXPECT_EQ(block, is_r_null_definition(np, l, 8, rng)) << "tensor " << k << " l " << l;
      EXPECT_EQ(block, l != target);
      (block ? nulls : nonnulls) += 1;
    }
  }
  EXPECT_GT(nulls, 0);
  EXPECT_GT(nonnulls, 0);
}

TEST(Nullity, FkmPairsAreFourNull) {
  Rng rng(6);
  auto np = random_fkm_pair(fkm_system<double>(Side::right), rng);
  for (int l = 2; l <= np.tensor.count(); ++l) {
    EXPECT_TRUE(is_r_null_block(np.tensor, l, 4));
    EXPECT_LT(r_null_definition_residual(np, l, 8, rng), 1e-12);
  }
  EXPECT_THROW(is_r_null_block(np.tensor, 1, 4), std::invalid_argument);
  EXPECT_THROW(is_r_null_block(np.tensor, 8, 4), std::out_of_range);
}

TEST(Nullity, SingularLocusDimension) {
  Rng rng(7);
  auto np = random_fkm_pair(fkm_system<double>(Side::left), rng);
  for (Complex iota : {Complex(0, 1), Complex(0, -1)}) {
    auto d = singular_locus_dim(np.tensor, iota);
    EXPECT_EQ(d.generic, 11);
    EXPECT_EQ(d.degenerate, 7);
  }
}

TEST(Nullity, ConditionA) {
  Rng rng(8);
  auto t = fkm_tensor(Side::left, rng);
  EXPECT_FALSE(detect_condition_A(t));
  EXPECT_FALSE(condition_A_blocks(t));
  auto z = synthetic_pair_tensor(VecD(0), MatD(0, 0), 6, false, rng);
  for (int a = 0; a < z.count(); ++a) {
    z.B[a].setZero();
    z.C[a].setZero();
  }
  EXPECT_TRUE(detect_condition_A(z));
  EXPECT_TRUE(condition_A_blocks(z));
}

TEST(Quadric, FrameIsOrthonormalAndPlaneInvariant) {
  Rng rng(9);
  MatD normals = rng.orthogonal(8);
  VecC c = random_quadric_point(8, rng);
  EXPECT_LT(std::abs(c.cwiseProduct(c).sum()), 1e-14);
  MatD q = quadric_frame(c, normals);
  EXPECT_LT(max_abs(MatD(q.transpose() * q - MatD::Identity(2, 2))), 1e-13);
  MatD q2 = quadric_frame(VecC(2.5 * c), normals);
  EXPECT_LT(max_abs(MatD(q2 - q)), 1e-13);
  // A unit phase rotates the frame inside the same oriented plane.
  MatD q3 = quadric_frame(VecC(std::polar(1.0, 0.7) * c), normals);
  MatD r = q.transpose() * q3;
  EXPECT_LT(max_abs(MatD(q * r - q3)), 1e-12);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
}

TEST(Quadric, RejectsPointsOffTheQuadric) {
  Rng rng(10);
  MatD normals = rng.orthogonal(8);
  EXPECT_THROW(quadric_frame(rng.complex_gaussian(8), normals), std::invalid_argument);
  EXPECT_THROW(quadric_frame(VecC(VecC::Zero(8)), normals), std::invalid_argument);
  EXPECT_THROW(quadric_frame(random_quadric_point(7, rng), normals), std::invalid_argument);
}
