#ifndef FKM_SUITES_HPP
#define FKM_SUITES_HPP

#include "fkm/normalization.hpp"
#include "fkm/pencil.hpp"
#include "fkm/report.hpp"
#include "fkm/vspace.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkm {

struct SuiteOptions {
  std::uint64_t seed = 0;
  ScalarMode mode = ScalarMode::float64;
  double tol = kDefaultTol;
  int samples = -1;  // suite default when negative
  Side side = Side::left;

  int count(int fallback) const { return samples > 0 ? samples : fallback; }
  Rng rng(std::uint64_t stream) const { return Rng(seed, stream); }
};

namespace detail {

// Runs f(0..n-1) on separate threads and returns the results in index order.
template <class F>
auto parallel_map(int n, F f) {
  using R = decltype(f(0));
  std::vector<std::future<R>> jobs;
  for (int i = 0; i < n; ++i) jobs.push_back(std::async(std::launch::async, f, i));
  std::vector<R> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline double exact_or(ScalarMode mode, double tol) { return mode == ScalarMode::exact ? 0.0 : tol; }

inline Check failed_check(std::string name, std::string anchor, const std::exception& e) {
  return bool_check(std::move(name), std::move(anchor), false, ScalarMode::float64, {{"error", e.what()}});
}

inline int at_least(double fraction, int n) { return static_cast<int>(std::ceil(fraction * n - 1e-9)); }

}  // namespace detail

// ---------------------------------------------------------------------------------------------

template <class T>
std::vector<Check> clifford_checks(const SuiteOptions& o) {
  const ScalarMode mode = ScalarTraits<T>::mode;
  const double tol = detail::exact_or(mode, o.tol);
  std::vector<Check> out;
  auto rep = build_skew_rep<T>(o.side);
  auto sys = lift_symmetric_system(rep);
  out.push_back(residual_check("clifford.skew-representation", "skew-rep-relations", skew_rep_residual(rep), tol, mode));
  out.push_back(residual_check("clifford.symmetric-relations", "clifford-relations", clifford_residual(sys), tol, mode,
                               {{"side", to_string(o.side)}, {"m", sys.m}, {"dim", sys.ambient()}}));
  Rng rng = o.rng(1);
  auto oct = verify_orthogonal_multiplication(octonion_multiplication<T>(o.side), 16, rng, o.tol);
  out.push_back(residual_check("clifford.octonion-hurwitz", "hurwitz-equations",
                               std::max(oct.hurwitz_residual, oct.composition_residual), tol, mode,
                               {{"hurwitz", oct.hurwitz_residual}, {"composition", oct.composition_residual}}));
  auto quat = verify_orthogonal_multiplication(quaternion_multiplication<T>(), 16, rng, o.tol);
  out.push_back(residual_check("clifford.quaternion-hurwitz", "hurwitz-equations",
                               std::max(quat.hurwitz_residual, quat.composition_residual), tol, mode));
  const int need = min_module_dim(7);
  out.push_back(bool_check("clifford.module-dimension", "clifford-module-table", rep.dim % need == 0, mode,
                           {{"k", 7}, {"min_module_dim", need}, {"rep_dim", rep.dim}}));
  return out;
}

inline std::vector<Check> clifford_suite(const SuiteOptions& o) {
  return o.mode == ScalarMode::exact ? clifford_checks<Rational>(o) : clifford_checks<double>(o);
}

// ---------------------------------------------------------------------------------------------

// Max cube residual and multiplicity agreement of S_c over `points` M_- frames and `normals`
// unit normals each.
struct CubeStats {
  double residual = 0.0;
  int bad_multiplicities = 0;
  std::array<Eigen::Index, 3> last{};
};

inline CubeStats cube_stats_minus_exact(const SuiteOptions& o, int points, int normals) {
  auto sys = fkm_system<Rational>(o.side);
  auto per = detail::parallel_map(points, [&](int k) {
    Rng rng = o.rng(200 + k);
    CubeStats s;
    VecQ x = sample_clifford_stiefel_exact(sys, rng);
    auto f = focal_frame_at(sys, x, rational_unit_vector(9, rng));
    for (int j = 0; j < normals; ++j) {
      MatQ sc = shape_operator(f, rational_unit_vector(9, rng));
      s.residual = std::max(s.residual, max_abs(MatQ(sc * sc * sc - sc)));
      s.last = cube_multiplicities(sc);
      if (s.last != std::array<Eigen::Index, 3>{7, 7, 8}) ++s.bad_multiplicities;
    }
    return s;
  });
  CubeStats all;
  for (const auto& s : per) {
    all.residual = std::max(all.residual, s.residual);
    all.bad_multiplicities += s.bad_multiplicities;
    all.last = s.last;
  }
  return all;
}

inline CubeStats cube_stats_float(const SuiteOptions& o, Leaf leaf, int points, int normals) {
  auto sys = fkm_system<double>(o.side);
  const std::array<Eigen::Index, 3> expect =
      leaf == Leaf::minus ? std::array<Eigen::Index, 3>{7, 7, 8} : std::array<Eigen::Index, 3>{8, 8, 7};
  CubeStats s;
  for (int k = 0; k < points; ++k) {
    Rng rng = o.rng((leaf == Leaf::minus ? 300 : 400) + static_cast<std::uint64_t>(k));
    FocalFrame<double> f;
    if (leaf == Leaf::minus)
      f = focal_frame_at(sys, sample_clifford_stiefel(sys, rng), VecD(rng.unit_vector(9)));
    else
      f = random_plus_frame(sys, rng);
    for (int j = 0; j < normals; ++j) {
      MatD sc = shape_operator(f, VecD(rng.unit_vector(f.normals.cols())));
      s.residual = std::max(s.residual, max_abs(MatD(sc * sc * sc - sc)));
      s.last = cube_multiplicities(sc, 1e-8);
      if (s.last != expect) ++s.bad_multiplicities;
    }
  }
  return s;
}

inline std::vector<Check> cartan_munzner_suite(const SuiteOptions& o) {
  std::vector<Check> out;
  const bool exact = o.mode == ScalarMode::exact;
  const int n = o.count(exact ? 20 : 1000);
  Rng rng = o.rng(100);
  CartanMunznerResidual r;
  if (exact) {
    auto poly = fkm_polynomial<Rational>(o.side);
    r = verify_cartan_munzner(poly, n, rng);
  } else {
    auto poly = fkm_polynomial<double>(o.side);
    r = verify_cartan_munzner(poly, n, rng);
  }
  const double tol = detail::exact_or(o.mode, o.tol);
  json d{{"points", n}, {"side", to_string(o.side)}};
  out.push_back(residual_check("cartan-munzner.gradient", "cartan-munzner-gradient", r.gradient, tol, o.mode, d));
  out.push_back(residual_check("cartan-munzner.laplacian", "cartan-munzner-laplacian", r.laplacian, tol, o.mode, d));

  const double cube_tol = exact ? 1e-10 : std::min(o.tol, 1e-10);
  if (exact) {
    const int pts = 3, nrm = 5;
    auto s = cube_stats_minus_exact(o, pts, nrm);
    out.push_back(residual_check("cartan-munzner.cube-minus", "cube-identity", s.residual, 0.0, ScalarMode::exact,
                                 {{"points", pts}, {"normals", nrm}}));
    out.push_back(bool_check("cartan-munzner.multiplicities-minus", "focal-multiplicities", s.bad_multiplicities == 0,
                             ScalarMode::exact,
                             {{"plus", s.last[0]}, {"minus", s.last[1]}, {"zero", s.last[2]}, {"mismatches", s.bad_multiplicities}}));
  } else {
    auto s = cube_stats_float(o, Leaf::minus, 50, 50);
    out.push_back(residual_check("cartan-munzner.cube-minus", "cube-identity", s.residual, cube_tol, o.mode,
                                 {{"points", 50}, {"normals", 50}}));
    out.push_back(bool_check("cartan-munzner.multiplicities-minus", "focal-multiplicities", s.bad_multiplicities == 0,
                             o.mode,
                             {{"plus", s.last[0]}, {"minus", s.last[1]}, {"zero", s.last[2]}, {"mismatches", s.bad_multiplicities}}));
  }
  auto s = cube_stats_float(o, Leaf::plus, 50, 50);
  out.push_back(residual_check("cartan-munzner.cube-plus", "cube-identity", s.residual, cube_tol, ScalarMode::float64,
                               {{"points", 50}, {"normals", 50}}));
  out.push_back(bool_check("cartan-munzner.multiplicities-plus", "focal-multiplicities", s.bad_multiplicities == 0,
                           ScalarMode::float64,
                           {{"plus", s.last[0]}, {"minus", s.last[1]}, {"zero", s.last[2]}, {"mismatches", s.bad_multiplicities}}));
  return out;
}

// ---------------------------------------------------------------------------------------------

inline void merge_ot(OtResiduals& acc, const OtResiduals& r) {
  for (int i = 0; i < 8; ++i) acc.identity[i] = std::max(acc.identity[i], r.identity[i]);
  acc.diagonal_companion = std::max(acc.diagonal_companion, r.diagonal_companion);
}

inline void add_ot_checks(std::vector<Check>& out, const std::string& leaf, const OtResiduals& r, double tol,
                          ScalarMode mode, int points) {
  for (int i = 0; i < 8; ++i)
    out.push_back(residual_check("ot-identities." + leaf + ".identity-" + std::to_string(i + 1),
                                 "ot-identity-" + std::to_string(i + 1), r.identity[i], tol, mode, {{"points", points}}));
  out.push_back(residual_check("ot-identities." + leaf + ".diagonal-companion", "ot-identity-7-diagonal",
                               r.diagonal_companion, tol, mode, {{"points", points}}));
}

// Perturbs B_1 of a tensor; the identities must then fail.
inline double perturbed_ot_residual(const SecondFormTensor<double>& t, Rng& rng) {
  auto bad = t;
  bad.B[0] += 1e-3 * rng.gaussian(bad.B[0].rows(), bad.B[0].cols());
  return verify_ot_identities(bad).max();
}

inline std::vector<Check> ot_identities_suite(const SuiteOptions& o) {
  std::vector<Check> out;
  const int points = o.count(20);
  const double tol = std::min(o.tol, 1e-12);
  auto poly = fkm_polynomial<double>(o.side);
  const auto& sys = poly.system;

  if (o.mode == ScalarMode::exact) {
    auto sq = fkm_system<Rational>(o.side);
    auto per = detail::parallel_map(points, [&](int k) {
      Rng rng = o.rng(500 + k);
      VecQ x = sample_clifford_stiefel_exact(sq, rng);
      auto f = focal_frame_at(sq, x, rational_unit_vector(9, rng));
      return verify_ot_identities(block_decompose(f));
    });
    OtResiduals acc;
    for (const auto& r : per) merge_ot(acc, r);
    add_ot_checks(out, "minus", acc, 0.0, ScalarMode::exact, points);
  }

  OtResiduals minus, plus;
  ThirdFormResiduals tf_minus, tf_plus;
  double sym = 0.0, neg = std::numeric_limits<double>::infinity();
  const int draws = 100;
  for (int k = 0; k < points; ++k) {
    Rng rng = o.rng(600 + static_cast<std::uint64_t>(k));
    auto fm = focal_frame_at(sys, sample_clifford_stiefel(sys, rng), VecD(rng.unit_vector(9)));
    auto fp = plus_frame_from_minus(sys, fm);
    auto tm = block_decompose(fm), tp = block_decompose(fp);
    if (o.mode != ScalarMode::exact) merge_ot(minus, verify_ot_identities(tm));
    merge_ot(plus, verify_ot_identities(tp));
    neg = std::min({neg, perturbed_ot_residual(tm, rng), perturbed_ot_residual(tp, rng)});
    for (auto [f, t, acc] : {std::tuple{&fm, &tm, &tf_minus}, std::tuple{&fp, &tp, &tf_plus}}) {
      auto q = third_form_components(poly, *f, *t, rng);
      auto r = third_form_identities(poly, *f, *t, q, draws, rng);
      acc->pq = std::max(acc->pq, r.pq);
      acc->norm_identity = std::max(acc->norm_identity, r.norm_identity);
      acc->p_paths = std::max(acc->p_paths, r.p_paths);
      sym = std::max(sym, third_form_symmetry_residual(q, 4, rng));
    }
  }
  if (o.mode != ScalarMode::exact) add_ot_checks(out, "minus", minus, tol, ScalarMode::float64, points);
  add_ot_checks(out, "plus", plus, tol, ScalarMode::float64, points);
  out.push_back(bool_check("ot-identities.negative-control", "ot-identities-perturbed", neg > 1e-6,
                           ScalarMode::float64, {{"min_perturbed_residual", neg}}));

  const double tf_tol = o.tol;
  json d{{"points", points}, {"draws", draws}};
  out.push_back(residual_check("third-form.minus.pq-orthogonality", "third-form-pq", tf_minus.pq, tf_tol,
                               ScalarMode::float64, d));
  out.push_back(residual_check("third-form.minus.norm-identity", "third-form-norm", tf_minus.norm_identity, tf_tol,
                               ScalarMode::float64, d));
  out.push_back(residual_check("third-form.plus.pq-orthogonality", "third-form-pq", tf_plus.pq, tf_tol,
                               ScalarMode::float64, d));
  out.push_back(residual_check("third-form.plus.norm-identity", "third-form-norm", tf_plus.norm_identity, tf_tol,
                               ScalarMode::float64, d));
  out.push_back(residual_check("third-form.expansion-consistency", "expansion-formula",
                               std::max(tf_minus.p_paths, tf_plus.p_paths), tf_tol, ScalarMode::float64, d));
  out.push_back(residual_check("third-form.symmetry", "third-form-symmetry", sym, tf_tol, ScalarMode::float64, d));
  return out;
}

// ---------------------------------------------------------------------------------------------

// Normalized FKM pair at a random M_+ point with a random n_1.
inline NormalizedPair random_fkm_pair(const CliffordSystem<double>& sys, Rng& rng) {
  auto t = block_decompose(random_plus_frame(sys, rng));
  return normalize_pair(random_pair(t, rng));
}

// Equivalence sample: null (FKM-derived) or with perturbed upper left blocks.
inline NormalizedPair equivalence_sample(const NormalizedPair& base, bool perturb, Rng& rng, int& target) {
  auto t = normal_form_rotation(mix_higher_normals(base.tensor, rng), base.data.r, rng);
  target = -1;
  if (perturb) {
    target = 2 + static_cast<int>(rng.uniform_int(0, t.count() - 2));
    const auto rows = t.dim(kPlus) - base.data.r, cols = t.dim(kZero) - base.data.r;
    t.B[target - 1].topLeftCorner(rows, cols) += 0.5 * rng.gaussian(rows, cols);
    t.C[target - 1].topLeftCorner(rows, cols) += 0.5 * rng.gaussian(rows, cols);
  }
  return as_normalized(t, base.data.sigma, base.data.delta);
}

inline std::vector<Check> nullity_suite(const SuiteOptions& o) {
  std::vector<Check> out;
  auto sys = fkm_system<double>(o.side);
  const int pairs = o.count(500);

  // r_lambda over random pairs.
  std::map<int, int> hist;
  for (int k = 0; k < pairs; ++k) {
    Rng rng = o.rng(1000 + static_cast<std::uint64_t>(k));
    auto t = block_decompose(random_plus_frame(sys, rng));
    ++hist[r_lambda(random_pair(t, rng))];
  }
  json h = json::object();
  int max_r = 0;
  for (auto [r, c] : hist) {
    h[std::to_string(r)] = c;
    max_r = std::max(max_r, r);
  }
  const int fours = hist.count(4) ? hist[4] : 0;
  out.push_back(bool_check("nullity.r-lambda-generic", "generic-r-lambda",
                           fours >= detail::at_least(0.95, pairs) && max_r <= 4, ScalarMode::float64,
                           {{"pairs", pairs}, {"histogram", h}, {"max", max_r}}));

  // Block test vs definition test.
  const int synth = 200;
  int agree = 0, nulls = 0, fkm_agree = 0, fkm_total = 0;
  double fkm_def = 0.0;
  {
    Rng rng = o.rng(1900);
    std::vector<NormalizedPair> bases;
    for (int k = 0; k < 10; ++k) bases.push_back(random_fkm_pair(sys, rng));
    for (const auto& np : bases) {
      for (int l = 2; l <= np.tensor.count(); ++l) {
        const bool block = is_r_null_block(np.tensor, l, np.data.r);
        const double def = r_null_definition_residual(np, l, 8, rng);
        fkm_def = std::max(fkm_def, def);
        fkm_agree += block == (def <= o.tol);
        ++fkm_total;
      }
    }
    for (int k = 0; k < synth; ++k) {
      int target = -1;
      auto np = equivalence_sample(bases[k % bases.size()], k % 2 == 1, rng, target);
      bool ok = true;
      for (int l = 2; l <= np.tensor.count(); ++l)
        ok &= is_r_null_block(np.tensor, l, np.data.r) == is_r_null_definition(np, l, 8, rng, o.tol);
      agree += ok;
      nulls += target < 0;
    }
  }
  out.push_back(bool_check("nullity.equivalence-synthetic", "r-nullity-equivalence", agree == synth, ScalarMode::float64,
                           {{"tensors", synth}, {"agreeing", agree}, {"null", nulls}}));
  out.push_back(bool_check("nullity.equivalence-fkm", "r-nullity-equivalence", fkm_agree == fkm_total,
                           ScalarMode::float64,
                           {{"tests", fkm_total}, {"agreeing", fkm_agree}, {"max_definition_residual", fkm_def}}));

  // Spectral data and singular locus at generic pairs.
  {
    Rng rng = o.rng(2000);
    const int n = 20;
    double s_lo = 1e9, s_hi = 0.0, f_lo = 1e9, f_hi = 0.0, dev = 0.0, nf = 0.0;
    int est_ok = 0;
    std::set<int> generic_dims;
    for (int k = 0; k < n; ++k) {
      auto np = random_fkm_pair(sys, rng);
      nf = std::max(nf, normal_form_residual(np));
      for (Eigen::Index i = 0; i < np.data.sigma.size(); ++i) {
        s_lo = std::min(s_lo, np.data.sigma(i));
        s_hi = std::max(s_hi, np.data.sigma(i));
        dev = std::max(dev, std::abs(np.data.sigma(i) - std::sqrt(0.5)));
      }
      for (double f : np.data.blocks) {
        f_lo = std::min(f_lo, f);
        f_hi = std::max(f_hi, f);
      }
      dev = std::max(dev, max_abs(np.data.delta));
      bool ok = true;
      for (Complex iota : {Complex(0, 1), Complex(0, -1)}) {
        auto sl = singular_locus_dim(np.tensor, iota);
        generic_dims.insert(sl.generic);
        ok &= sl.generic == 15 - np.data.r && sl.degenerate == 7;
      }
      est_ok += ok && np.data.r == 4;
    }
    out.push_back(residual_check("nullity.normal-form", "pair-normalization", nf, 1e3 * o.tol, ScalarMode::float64,
                                 {{"pairs", n}}));
    out.push_back(residual_check("nullity.spectral-data", "spectral-data-generic", dev, 1e-10, ScalarMode::float64,
                                 {{"pairs", n}, {"expected_sigma", std::sqrt(0.5)}, {"sigma_min", s_lo},
                                  {"sigma_max", s_hi}, {"delta_block_min", f_lo}, {"delta_block_max", f_hi}}));
    out.push_back(bool_check("nullity.singular-locus", "singular-locus-dimension", est_ok == n, ScalarMode::float64,
                             {{"pairs", n}, {"expected", 11}, {"observed", json(generic_dims)}}));
  }

  // Condition A: kernel test vs block test on FKM data and on a block-free tensor.
  {
    Rng rng = o.rng(2100);
    bool agree_a = true;
    for (int k = 0; k < 5; ++k) {
      auto t = block_decompose(random_plus_frame(sys, rng));
      agree_a &= detect_condition_A(t) == condition_A_blocks(t) && !condition_A_blocks(t);
    }
    auto z = synthetic_pair_tensor(VecD(0), MatD(0, 0), 6, false, rng);
    for (int a = 0; a < z.count(); ++a) {
      z.B[a].setZero();
      z.C[a].setZero();
    }
    agree_a &= detect_condition_A(z) && condition_A_blocks(z);
    out.push_back(bool_check("nullity.condition-a", "condition-a-zero-null", agree_a));
  }

  // Quadric frame: orthonormal output for points on the quadric, rejection off it.
  {
    Rng rng = o.rng(2200);
    MatD normals = rng.orthogonal(8);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      MatD q = quadric_frame(random_quadric_point(8, rng), normals);
      worst = std::max(worst, max_abs(MatD(q.transpose() * q - MatD::Identity(2, 2))));
    }
    bool rejects = false;
    try {
      quadric_frame(rng.complex_gaussian(8), normals);
    } catch (const std::invalid_argument&) {
      rejects = true;
    }
    out.push_back(residual_check("nullity.quadric-frame", "quadric-frame", rejects ? worst : 1.0, 1e-12));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

inline std::vector<Check> kernels_suite(const SuiteOptions& o) {
  auto sys = fkm_system<double>(o.side);
  const int points = o.count(20);
  int good_b = 0, good_c = 0;
  json seen = json::array();
  for (int k = 0; k < points; ++k) {
    Rng rng = o.rng(3000 + static_cast<std::uint64_t>(k));
    auto d = joint_kernel_dims(block_decompose(random_plus_frame(sys, rng)));
    good_b += d.b == 1 && d.bt == 2;
    good_c += d.c == 1 && d.ct == 2;
    seen.push_back({d.b, d.bt, d.c, d.ct});
  }
  const int need = detail::at_least(0.95, points);
  return {bool_check("kernels.b", "joint-kernel-b", good_b >= need, ScalarMode::float64,
                     {{"points", points}, {"matching", good_b}, {"required", need}, {"dims", seen}}),
          bool_check("kernels.c", "joint-kernel-c", good_c >= need, ScalarMode::float64,
                     {{"points", points}, {"matching", good_c}, {"required", need}})};
}

// ---------------------------------------------------------------------------------------------

inline std::vector<Check> mirror_suite(const SuiteOptions& o) {
  std::vector<Check> out;
  auto poly = fkm_polynomial<double>(o.side);
  const auto& sys = poly.system;
  const int points = o.count(5);
  const double tol = std::min(o.tol, 1e-10);
  double sharp = 0, star = 0, memb = 0, vq = 0, vp = 0, qfit = 0, qorth = 0, mtx = 0, good = 0, hur = 0;
  double bqc = 0, askew = 0, asharp = 0, zskew = 0, qo = 0, qres = 0;
  bool invol = true;
  std::set<std::string> circs;
  std::string error;
  for (int k = 0; k < points; ++k) {
    Rng rng = o.rng(4000 + static_cast<std::uint64_t>(k));
    auto m = make_mirror_triple(random_plus_frame(sys, rng));
    auto sh = transport_sharp(m);
    sharp = std::max(sharp, tensor_distance(sh.tensor, block_decompose(sh.frame)));
    invol &= tensors_identical(transport_sharp(sh).tensor, m.tensor);
    auto st = transport_star(m);
    star = std::max(star, tensor_distance(st.tensor, block_decompose(st.frame)));
    memb = std::max(memb, clifford_stiefel_residual(sys, st.frame.x));
    try {
      auto af = adapted_frame(m.frame, rng);
      auto am = make_mirror_triple(af.frame);
      mtx = std::max(mtx, validate_pattern(am.tensor, mtx_pattern(), tol).max_entry);
      good = std::max(good, validate_pattern(transport_star(am).tensor, good_pattern(), tol).max_entry);
      hur = std::max(hur, hurwitz_residual(extract_348_multiplication(am.tensor)));
      auto fs = validate_frame_symmetries(am.tensor, am.a_sharp, tol);
      qres = std::max(qres, fs.fit_residual);
      qo = std::max(qo, fs.orthogonality);
      bqc = std::max(bqc, fs.b_equals_qc);
      askew = std::max(askew, fs.a_skew);
      asharp = std::max(asharp, fs.a_sharp_skew);
      zskew = std::max(zskew, fs.z_skew);
      auto v = v_subspace(af);
      auto rv = restrict_to_V(poly, v, 20, rng);
      vq = std::max(vq, rv.q_all);
      vp = std::max(vp, rv.p_high);
      auto qf = fit_quaternion_form(poly, v, 10, rng);
      qfit = std::max(qfit, qf.residual);
      qorth = std::max(qorth, qf.orthogonality);
      circs.insert(qf.circ);
    } catch (const std::exception& e) {
      error = e.what();
    }
  }
  const ScalarMode f = ScalarMode::float64;
  json d{{"points", points}};
  out.push_back(residual_check("mirror.sharp-direct", "mirror-sharp", sharp, tol, f, d));
  out.push_back(bool_check("mirror.sharp-involution", "mirror-sharp-involution", invol, f, d));
  out.push_back(residual_check("mirror.star-direct", "mirror-star", star, tol, f, d));
  out.push_back(residual_check("mirror.star-membership", "mirror-star", memb, tol, f, d));
  auto adapted = [&](std::string name, std::string anchor, double r, json det = json::object()) {
    if (!error.empty()) det["error"] = error;
    out.push_back(residual_check(std::move(name), std::move(anchor), error.empty() ? r : INFINITY, tol, f, det));
  };
  adapted("mirror.mtx-pattern", "adapted-block-pattern", mtx);
  adapted("mirror.good-pattern", "four-null-block-pattern", good);
  adapted("mirror.hurwitz-348", "composition-3-4-8", hur);
  adapted("mirror.v-restriction-q", "q-star-on-V", vq);
  adapted("mirror.v-restriction-p", "p-star-on-V", vp);
  adapted("mirror.quaternion-form", "p-star-quaternion-form", std::max(qfit, qorth),
          {{"circ", json(circs)}, {"fit_residual", qfit}, {"orthogonality", qorth}});
  adapted("frame-symmetry.q-fit", "frame-symmetry-q", std::max(qres, qo), {{"fit", qres}, {"orthogonality", qo}});
  adapted("frame-symmetry.b-equals-qc", "frame-symmetry-bc", bqc);
  adapted("frame-symmetry.a-skew", "frame-symmetry-a-skew", askew);
  adapted("frame-symmetry.a-sharp-skew", "frame-symmetry-a-sharp-skew", asharp);
  adapted("frame-symmetry.z-skew", "frame-symmetry-z-skew", zskew);
  return out;
}

// ---------------------------------------------------------------------------------------------

inline std::vector<Check> pencil_suite(const SuiteOptions& o) {
  std::vector<Check> out;
  auto sys = fkm_system<double>(o.side);
  const int points = o.count(5);
  const int trials = 16;
  int rank_ok = 0;
  double third = 0, tpl = 0, drow = 0, grow = 0, db = 0, gb = 0, rel = 0;
  std::string error;
  for (int k = 0; k < points; ++k) {
    Rng rng = o.rng(5000 + static_cast<std::uint64_t>(k));
    try {
      auto af = adapted_frame(random_plus_frame(sys, rng), rng);
      auto t = block_decompose(af.frame);
      BlockPencil b(b_generators(t)), d(d_generators(t)), g(g_generators(t));
      rank_ok += generic_rank(b, trials, rng) == 2;
      auto v = common_column_relation(b);
      if (!v || std::abs(std::abs((*v)(2)) - 1.0) > 1e-10) third = INFINITY;
      for (int a = 0; a < t.count(); ++a) third = std::max(third, max_abs(MatD(t.B[a].col(2))));
      tpl = std::max(tpl, b_template_residual(t, af.s, af.a, af.b));
      rel = std::max(rel, adapted_relations_residual(t));
      drow = std::max(drow, d_pencil_row_residual(d, 20, rng));
      grow = std::max(grow, d_pencil_row_residual(g, 20, rng));
      db = std::max(db, pencil_product_residual(d, b, 10, rng));
      gb = std::max(gb, pencil_product_residual(g, b, 10, rng));
    } catch (const std::exception& e) {
      error = e.what();
    }
  }
  const ScalarMode f = ScalarMode::float64;
  const double tol = std::min(o.tol, 1e-10);
  auto add = [&](std::string name, std::string anchor, double r, double t) {
    json det{{"points", points}};
    if (!error.empty()) det["error"] = error;
    out.push_back(residual_check(std::move(name), std::move(anchor), error.empty() ? r : INFINITY, t, f, det));
  };
  out.push_back(bool_check("pencil.b-generic-rank", "b-pencil-generic-rank", error.empty() && rank_ok == points, f,
                           {{"points", points}, {"trials", trials}, {"expected", 2}}));
  add("pencil.third-column", "common-zero-column", third, 1e-12);
  add("pencil.b-template", "b-block-normal-form", tpl, tol);
  add("pencil.adapted-relations", "adapted-relations", rel, tol);
  add("pencil.d-row-structure", "d-pencil-rows", drow, tol);
  add("pencil.g-row-structure", "g-pencil-rows", grow, tol);
  add("pencil.db-product", "d-b-product", db, tol);
  add("pencil.gb-product", "g-b-product", gb, tol);

  Rng rng = o.rng(5900);
  std::vector<MatD> rnd;
  for (int i = 0; i < 4; ++i) rnd.push_back(rng.gaussian(4, 3));
  BlockPencil rp(rnd);
  const auto rr = generic_rank(rp, trials, rng);
  const bool no_rel = !common_column_relation(rp).has_value();
  out.push_back(bool_check("pencil.random-control", "random-pencil", rr == 3 && no_rel, f,
                           {{"rank", rr}, {"common_column", !no_rel}}));
  std::vector<MatD> rd;
  for (int i = 0; i < 4; ++i) rd.push_back(rng.gaussian(4, 4));
  const double rdr = d_pencil_row_residual(BlockPencil(rd), 20, rng);
  out.push_back(bool_check("pencil.d-row-control", "d-pencil-rows-random", rdr > 1e-6, f, {{"residual", rdr}}));
  return out;
}

// ---------------------------------------------------------------------------------------------

inline std::vector<Check> appendix_suite(const SuiteOptions& o) {
  std::vector<Check> out;
  const int trials = o.count(500);
  const ScalarMode f = ScalarMode::float64;
  for (int kind = 1; kind <= 3; ++kind) {
    Rng rng = o.rng(6000 + static_cast<std::uint64_t>(kind));
    auto p = appendix_pencil(kind, rng);
    auto r = appendix_kernel_sampler(p, trials, rng, o.tol);
    out.push_back(bool_check("appendix.case-" + std::to_string(kind), "appendix-kernel-bound", r.max <= 6, f,
                             {{"dim", p.dim()}, {"trials", trials}, {"bound", 6}, {"max", r.max}, {"min", r.min}}));
  }
  Rng rng = o.rng(6100);
  auto p = appendix_pencil(1, rng);
  VecC c0 = VecC::Zero(4);
  c0(0) = 1.0;
  const auto d0 = appendix_kernel_dim(p, c0, o.tol);
  out.push_back(bool_check("appendix.degenerate-r0", "appendix-degenerate", d0 == 7, f, {{"kernel_dim", d0}}));
  auto iso = isotropic_rank_one_pencil(rng);
  VecC c1 = VecC::Zero(4);
  c1(0) = 1.0;
  c1(1) = 1.0;
  const auto d1 = appendix_kernel_dim(iso, c1, o.tol);
  out.push_back(bool_check("appendix.isotropic-rank-one", "appendix-degenerate", d1 == 7, f, {{"kernel_dim", d1}}));
  return out;
}

// ---------------------------------------------------------------------------------------------

inline std::vector<Check> reproduce_example_suite(const SuiteOptions& o) {
  const double tol = std::min(o.tol, 1e-10);
  auto ex = reproduce_example(tol);
  const ScalarMode f = ScalarMode::float64;
  json m{{"found", ex.match.found}, {"scale", ex.match.scale}, {"row_map", ex.match.row_map},
         {"col_map", ex.match.col_map}, {"row_sign", ex.match.row_sign}, {"col_sign", ex.match.col_sign}};
  json bs = json::array();
  for (const auto& b : ex.B) bs.push_back(matrix_to_json(b));
  return {
      bool_check("reproduce-example.literal-point-off-manifold", "example-point", ex.literal_membership > 1e-3, f,
                 {{"membership_residual", ex.literal_membership}}),
      residual_check("reproduce-example.corrected-membership", "example-point", ex.corrected_membership, tol, f),
      residual_check("reproduce-example.eigenspace-bases", "example-bases", ex.basis_residual, tol, f),
      residual_check("reproduce-example.b3-zero", "example-b3", ex.b3_norm, tol, f),
      residual_check("reproduce-example.template-match", "example-templates", ex.match.found ? ex.match.residual : INFINITY,
                     tol, f, {{"match", m}, {"B", bs}}),
  };
}

// ---------------------------------------------------------------------------------------------

using SuiteFn = std::function<std::vector<Check>(const SuiteOptions&)>;

inline const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"clifford", clifford_suite},         {"cartan-munzner", cartan_munzner_suite},
      {"ot-identities", ot_identities_suite}, {"nullity", nullity_suite},
      {"kernels", kernels_suite},           {"mirror", mirror_suite},
      {"pencil", pencil_suite},             {"appendix", appendix_suite},
      {"reproduce-example", reproduce_example_suite},
  };
  return table;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [n, fn] : suite_table()) names.push_back(n);
  names.push_back("full");
  return names;
}

inline bool is_suite(const std::string& name) {
  for (const auto& n : suite_names())
    if (n == name) return true;
  return false;
}

// Runs a suite; internal errors become a failing check named "<suite>.internal".
inline Report run_suite(const std::string& name, const SuiteOptions& o) {
  if (!is_suite(name)) throw std::invalid_argument("unknown suite: " + name);
  Report r;
  r.command = name;
  r.seed = o.seed;
  r.mode = o.mode;
  r.tolerance = o.tol;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [n, fn] : suite_table()) {
    if (name != "full" && name != n) continue;
    try {
      r.add(fn(o));
    } catch (const std::exception& e) {
      r.add(detail::failed_check(n + ".internal", "internal-consistency", e));
    }
  }
  r.sort_checks();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace fkm

#endif  // FKM_SUITES_HPP
