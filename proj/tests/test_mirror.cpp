#include "fkm/mirror.hpp"
#include "fkm/vspace.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace fkm;

class Mirror : public ::testing::TestWithParam<Side> {};

TEST_P(Mirror, TransportsMatchDirectComputation) {
  auto sys = fkm_system<double>(GetParam());
  Rng rng(1);
  for (int k = 0; k < 3; ++k) {
    auto m = make_mirror_triple(random_plus_frame(sys, rng));
    auto sh = transport_sharp(m);
    EXPECT_LT(tensor_distance(sh.tensor, block_decompose(sh.frame)), 1e-10);
    EXPECT_TRUE(tensors_identical(transport_sharp(sh).tensor, m.tensor));
    auto st = transport_star(m);
    EXPECT_LT(tensor_distance(st.tensor, block_decompose(st.frame)), 1e-10);
    EXPECT_LT(clifford_stiefel_residual(sys, st.frame.x), 1e-12);
    EXPECT_LT((st.frame.x - m.x_star()).norm(), 1e-14);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, Mirror, ::testing::Values(Side::left, Side::right, Side::mixed));

class Adapted : public ::testing::TestWithParam<Side> {};

TEST_P(Adapted, PatternsTemplatesAndSymmetries) {
  auto poly = fkm_polynomial<double>(GetParam());
  Rng rng(2);
  auto af = adapted_frame(random_plus_frame(poly.system, rng), rng);
  auto am = make_mirror_triple(af.frame);
  EXPECT_TRUE(validate_pattern(am.tensor, mtx_pattern()).ok);
  EXPECT_TRUE(validate_pattern(transport_star(am).tensor, good_pattern()).ok);
  EXPECT_LT(adapted_relations_residual(am.tensor), 1e-10);
  EXPECT_LT(b_template_residual(am.tensor, af.s, af.a, af.b), 1e-10);
  EXPECT_LT(hurwitz_residual(extract_348_multiplication(am.tensor)), 1e-10);
  auto fs = validate_frame_symmetries(am.tensor, am.a_sharp);
  EXPECT_LT(fs.fit_residual, 1e-10);
  EXPECT_LT(fs.orthogonality, 1e-10);
  EXPECT_LT(fs.b_equals_qc, 1e-10);
  EXPECT_LT(fs.a_skew, 1e-10);
  EXPECT_LT(fs.a_sharp_skew, 1e-10);
  EXPECT_LT(fs.z_skew, 1e-10);
}

TEST_P(Adapted, RestrictionToV) {
  auto poly = fkm_polynomial<double>(GetParam());
  Rng rng(3);
  auto af = adapted_frame(random_plus_frame(poly.system, rng), rng);
  auto v = v_subspace(af);
  EXPECT_EQ(v.basis().cols(), 10);
  auto r = restrict_to_V(poly, v, 20, rng);
  EXPECT_LT(r.q_all, 1e-10);
  EXPECT_LT(r.p_high, 1e-10);
  auto q = fit_quaternion_form(poly, v, 10, rng);
  EXPECT_LT(q.residual, 1e-10);
  EXPECT_LT(q.orthogonality, 1e-10);
  EXPECT_GT(q.other_residual, 1e-3);
  EXPECT_TRUE(q.circ == "left" || q.circ == "right");
}

INSTANTIATE_TEST_SUITE_P(Definite, Adapted, ::testing::Values(Side::left, Side::right));

TEST(Adapted, MixedFamilyIsRejected) {
  auto sys = fkm_system<double>(Side::mixed);
  Rng rng(4);
  EXPECT_THROW(adapted_frame(random_plus_frame(sys, rng), rng), std::runtime_error);
}

TEST(Adapted, DistortedDataFailFrameSymmetry) {
  auto sys = fkm_system<double>(Side::left);
  Rng rng(5);
  auto af = adapted_frame(random_plus_frame(sys, rng), rng);
  auto am = make_mirror_triple(af.frame);
  auto bad = am.tensor;
  // c_a != f_a in the lower right block breaks B = Q C.
  bad.C[0].bottomRightCorner(4, 4) += 0.1 * rng.gaussian(4, 4);
  auto fs = validate_frame_symmetries(bad, am.a_sharp);
  EXPECT_GT(std::max(fs.fit_residual, fs.b_equals_qc), 1e-6);
}

TEST(Adapted, RandomTensorFailsPattern) {
  Rng rng(6);
  SecondFormTensor<double> t;
  t.grams = {MatD::Identity(8, 8), MatD::Identity(8, 8), MatD::Identity(7, 7)};
  for (int a = 0; a < 7; ++a) {
    t.A.push_back(rng.gaussian(8, 8));
    t.B.push_back(rng.gaussian(8, 7));
    t.C.push_back(rng.gaussian(8, 7));
  }
  auto r = validate_pattern(t, mtx_pattern());
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.where.empty());
  EXPECT_THROW(validate_pattern(t, good_pattern()), std::invalid_argument);
  EXPECT_THROW(validate_frame_symmetries(t, {}), std::invalid_argument);
}

TEST(SignedPermutation, RecoversHiddenPermutation) {
  auto tpl = example_templates();
  Rng rng(7);
  std::vector<int> rp(8), cp(7);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(cp.begin(), cp.end(), 0);
  std::shuffle(rp.begin(), rp.end(), rng.engine());
  std::shuffle(cp.begin(), cp.end(), rng.engine());
  std::vector<MatD> m;
  for (const auto& t : tpl) {
    MatD x(8, 7);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 7; ++j) x(rp[i], cp[j]) = -3.0 * (i % 3 == 0 ? -1 : 1) * t(i, j);
    m.push_back(x);
  }
  auto r = match_signed_permutation(m, tpl);
  ASSERT_TRUE(r.found);
  EXPECT_NEAR(r.scale, 3.0, 1e-12);
  EXPECT_LT(r.residual, 1e-12);
}

TEST(SignedPermutation, RejectsNonMatch) {
  auto tpl = example_templates();
  auto m = tpl;
  m[0](0, 0) += 0.5;
  EXPECT_FALSE(match_signed_permutation(m, tpl).found);
  EXPECT_THROW(match_signed_permutation({}, tpl), std::invalid_argument);
}

TEST(Example, Reproduction) {
  auto ex = reproduce_example();
  EXPECT_GT(ex.literal_membership, 1e-3);
  EXPECT_LT(ex.corrected_membership, 1e-14);
  EXPECT_LT(ex.basis_residual, 1e-10);
  EXPECT_LT(ex.b3_norm, 1e-10);
  ASSERT_TRUE(ex.match.found);
  EXPECT_NEAR(ex.match.scale, std::sqrt(0.5), 1e-12);
  EXPECT_LT(ex.match.residual, 1e-10);
}
