#include "fkm/forms.hpp"

#include <gtest/gtest.h>

using namespace fkm;

namespace {

struct Frames {
  FocalFrame<double> minus, plus;
};

Frames random_frames(const CliffordSystem<double>& sys, Rng& rng) {
  auto fm = focal_frame_at(sys, sample_clifford_stiefel(sys, rng), VecD(rng.unit_vector(9)));
  return {fm, plus_frame_from_minus(sys, fm)};
}

}  // namespace

class Forms : public ::testing::TestWithParam<Side> {};

TEST_P(Forms, BlocksReassembleTheShapeForms) {
  auto sys = fkm_system<double>(GetParam());
  Rng rng(1);
  auto fr = random_frames(sys, rng);
  for (const auto* f : {&fr.minus, &fr.plus}) {
    auto t = block_decompose(*f);
    EXPECT_TRUE(t.orthonormal());
    EXPECT_LT(reassembly_residual(*f, t), 1e-12);
  }
}

TEST_P(Forms, BlockIdentitiesHold) {
  auto sys = fkm_system<double>(GetParam());
  Rng rng(2);
  for (int k = 0; k < 3; ++k) {
    auto fr = random_frames(sys, rng);
    EXPECT_LT(verify_ot_identities(block_decompose(fr.minus)).max(), 1e-12);
    EXPECT_LT(verify_ot_identities(block_decompose(fr.plus)).max(), 1e-12);
  }
}

TEST_P(Forms, IdentitiesSurviveNormalAndBasisRotations) {
  auto sys = fkm_system<double>(GetParam());
  Rng rng(3);
  auto t = block_decompose(random_frames(sys, rng).plus);
  auto mixed = mix_normals(t, MatD(rng.orthogonal(t.count())));
  auto rotated = change_bases(mixed, rng.orthogonal(8), rng.orthogonal(8), rng.orthogonal(7));
  EXPECT_LT(verify_ot_identities(rotated).max(), 1e-12);
}

TEST_P(Forms, ThirdFormIdentities) {
  auto poly = fkm_polynomial<double>(GetParam());
  Rng rng(4);
  auto fr = random_frames(poly.system, rng);
  for (const auto* f : {&fr.minus, &fr.plus}) {
    auto t = block_decompose(*f);
    auto q = third_form_components(poly, *f, t, rng);
    auto r = third_form_identities(poly, *f, t, q, 50, rng);
    EXPECT_LT(r.pq, 1e-9);
    EXPECT_LT(r.norm_identity, 1e-9);
    EXPECT_LT(r.p_paths, 1e-12);
    EXPECT_LT(third_form_symmetry_residual(q, 5, rng), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, Forms, ::testing::Values(Side::left, Side::right, Side::mixed));

TEST(Forms, PerturbedBlocksFailIdentities) {
  auto sys = fkm_system<double>(Side::left);
  Rng rng(5);
  auto t = block_decompose(random_frames(sys, rng).plus);
  auto bad = t;
  bad.B[2](1, 1) += 1e-4;
  EXPECT_GT(verify_ot_identities(bad).max(), 1e-6);
  bad = t;
  bad.A[0](3, 2) += 1e-4;
  EXPECT_GT(verify_ot_identities(bad).max(), 1e-6);
}

TEST(Forms, SecondFormComponentsMatchAmbientForms) {
  auto sys = fkm_system<double>(Side::right);
  Rng rng(6);
  auto f = random_frames(sys, rng).plus;
  auto t = block_decompose(f);
  VecD u = rng.unit_vector(t.tangent_dim());
  VecD y = f.tangent() * u;
  VecD p = second_form_components(t, u);
  for (int a = 0; a <= t.count(); ++a)
    EXPECT_NEAR(p(a), y.dot(f.ambient_form(VecD(f.normals.col(a))) * y), 1e-12);
}

TEST(Forms, ExactIdentitiesOnMinus) {
  auto sys = fkm_system<Rational>(Side::left);
  Rng rng(7);
  VecQ x = sample_clifford_stiefel_exact(sys, rng);
  auto f = focal_frame_at(sys, x, rational_unit_vector(9, rng));
  auto t = block_decompose(f);
  EXPECT_FALSE(t.orthonormal());
  EXPECT_EQ(reassembly_residual(f, t), 0.0);
  auto r = verify_ot_identities(t);
  for (double v : r.identity) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.diagonal_companion, 0.0);
}

TEST(Forms, AssembleRejectsBadIndex) {
  auto sys = fkm_system<double>(Side::left);
  Rng rng(8);
  auto t = block_decompose(random_frames(sys, rng).minus);
  EXPECT_THROW(t.assemble(t.count() + 1), std::out_of_range);
  MatD s0 = t.assemble(0);
  EXPECT_NEAR(s0.trace(), 0.0, 1e-12);
}
