#ifndef FKM_NORMALIZATION_HPP
#define FKM_NORMALIZATION_HPP

#include "fkm/forms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fkm {

// Normal form of the pair (n_0, n_1): B_1 = C_1 = diag(0, sigma), A_1 = diag(I, Delta).
// up, um, u0 are the orthogonal basis changes (new basis = old basis * u).
struct SpectralData {
  int r = 0;
  VecD sigma;                  // descending
  MatD delta;                  // r x r lower right block of A_1
  std::vector<double> blocks;  // f_i of the 2x2 blocks [[0, f], [-f, 0]], ascending per sigma group
  int zero_block = 0;          // size of the Delta_1 = 0 block
  MatD up, um, u0;
  bool marginal = false;       // some singular value of B_1 sits near the rank threshold
  double delta_skew = 0.0;     // |Delta + Delta^t|
};

struct NormalizedPair {
  SpectralData data;
  SecondFormTensor<double> tensor;
};

namespace detail {

// Orthogonal R with R^t D R block diagonal (2x2 rotation blocks, f > 0 ascending, zeros first)
// for a skew D.
inline std::pair<MatD, std::vector<double>> skew_canonical(const MatD& d, double tol) {
  const auto n = d.rows();
  if (n == 0) return {MatD(0, 0), {}};
  Eigen::RealSchur<MatD> schur(d);
  MatD q = schur.matrixU(), t = schur.matrixT();
  struct Piece {
    Eigen::Index start, size;
    double f;
  };
  std::vector<Piece> pieces;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && std::abs(t(i + 1, i)) > tol) {
      pieces.push_back({i, 2, 0.5 * (t(i, i + 1) - t(i + 1, i))});
      i += 2;
    } else {
      pieces.push_back({i, 1, 0.0});
      ++i;
    }
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.size != b.size) return a.size < b.size;
    return std::abs(a.f) < std::abs(b.f);
  });
  MatD r(n, n);
  std::vector<double> fs;
  Eigen::Index c = 0;
  for (const auto& p : pieces) {
    if (p.size == 1) {
      r.col(c++) = q.col(p.start);
      continue;
    }
    // Orthonormalize the 2-dim invariant plane and orient it so the block reads [[0,f],[-f,0]].
    MatD plane = q.middleCols(p.start, 2);
    VecD e1 = plane.col(0).normalized();
    VecD e2 = plane.col(1) - e1 * e1.dot(plane.col(1));
    e2.normalize();
    double f = e1.dot(d * e2);
    if (f < 0) {
      e2 = -e2;
      f = -f;
    }
    r.col(c++) = e1;
    r.col(c++) = e2;
    fs.push_back(f);
  }
  return {r, fs};
}

}  // namespace detail

// Normalizes the pair (n_0, n_1) with n_1 the first non-distinguished normal of t.
inline NormalizedPair normalize_pair(const SecondFormTensor<double>& t, double tol = kDefaultTol) {
  if (!t.orthonormal()) throw std::invalid_argument("normalize_pair: frame not orthonormal");
  if (t.count() < 1) throw std::invalid_argument("normalize_pair: no normal n_1");
  const MatD &a1 = t.A[0], &b1 = t.B[0], &c1 = t.C[0];
  const auto mp = t.dim(kPlus), mm = t.dim(kMinus), mz = t.dim(kZero);
  if (mp != mm) throw std::invalid_argument("normalize_pair: E_+ and E_- differ in dimension");
  double scale = std::max(1.0, max_abs(b1));
  if (max_abs(MatD(b1.transpose() * b1 - c1.transpose() * c1)) > 1e3 * tol * scale)
    throw std::invalid_argument("not a valid second form");

  Eigen::JacobiSVD<MatD> svd(b1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VecD s = svd.singularValues();
  const double s0 = s.size() ? s(0) : 0.0;
  const double thr = tol * std::max(1.0, s0);
  SpectralData sd;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) ++sd.r;
    if (s(i) > 1e-2 * thr && s(i) < 1e2 * thr) sd.marginal = true;
  }
  const int r = sd.r;
  MatD u = svd.matrixU(), v = svd.matrixV();
  MatD uk = u.rightCols(mp - r), us = u.leftCols(r);
  MatD vk = v.rightCols(mz - r), vs = v.leftCols(r);
  sd.sigma = s.head(r);
  MatD ws = c1 * vs;
  for (int i = 0; i < r; ++i) ws.col(i) /= sd.sigma(i);
  MatD wk = r > 0 ? kernel_basis(MatD(ws.transpose()), tol) : MatD::Identity(mm, mm);
  if (wk.cols() != mm - r) throw std::invalid_argument("not a valid second form");
  MatD a11 = uk.transpose() * a1 * wk;
  wk = wk * a11.transpose();

  // Skew canonical form of Delta within each group of equal sigma.
  MatD delta = us.transpose() * a1 * ws;
  sd.delta_skew = max_abs(MatD(delta + delta.transpose()));
  for (int i = 0; i < r;) {
    int j = i + 1;
    while (j < r && std::abs(sd.sigma(j) - sd.sigma(i)) <= 1e3 * thr) ++j;
    if (sd.delta_skew <= 1e3 * tol) {
      MatD blk = delta.block(i, i, j - i, j - i);
      MatD skew = 0.5 * (blk - blk.transpose());
      auto [rot, fs] = detail::skew_canonical(skew, 1e3 * tol);
      us.middleCols(i, j - i) = us.middleCols(i, j - i) * rot;
      vs.middleCols(i, j - i) = vs.middleCols(i, j - i) * rot;
      ws.middleCols(i, j - i) = ws.middleCols(i, j - i) * rot;
      sd.blocks.insert(sd.blocks.end(), fs.begin(), fs.end());
      if (i == 0) sd.zero_block = (j - i) - 2 * static_cast<int>(fs.size());
    }
    i = j;
  }
  sd.up = hstack<double>({uk, us});
  sd.um = hstack<double>({wk, ws});
  sd.u0 = hstack<double>({vk, vs});
  NormalizedPair out{sd, change_bases(t, sd.up, sd.um, sd.u0)};
  out.data.delta = out.tensor.A[0].bottomRightCorner(r, r);
  return out;
}

// Residual of the normal form: |B_1 - diag(0, sigma)|, |C_1 - diag(0, sigma)|, |A_1 - diag(I, Delta)|.
inline double normal_form_residual(const NormalizedPair& np) {
  const auto& t = np.tensor;
  const int r = np.data.r;
  MatD bz = MatD::Zero(t.dim(kPlus), t.dim(kZero));
  bz.bottomRightCorner(r, r) = np.data.sigma.asDiagonal();
  MatD az = MatD::Identity(t.dim(kPlus), t.dim(kMinus));
  az.bottomRightCorner(r, r) = np.data.delta;
  return std::max({max_abs(MatD(t.B[0] - bz)), max_abs(MatD(t.C[0] - bz)), max_abs(MatD(t.A[0] - az))});
}

// r = dim E_0 - dim(ker S_0 cap ker S_1), from the assembled forms.
template <class T>
int r_lambda(const SecondFormTensor<T>& t, double tol = kDefaultTol) {
  Mat<T> k = kernel_basis(vstack<T>({t.assemble(0), t.assemble(1)}), tol);
  return static_cast<int>(t.dim(kZero) - k.cols());
}

// Orthonormal (n~_0, n~_1) by Gram-Schmidt on the real and imaginary parts of sum c_i n_i.
inline MatD quadric_frame(const VecC& c, const MatD& normals, double tol = 1e-10) {
  if (c.size() != normals.cols()) throw std::invalid_argument("quadric_frame: wrong length");
  double nc = c.squaredNorm();
  if (nc == 0.0) throw std::invalid_argument("quadric_frame: zero coefficients");
  if (std::abs(c.cwiseProduct(c).sum()) > tol * nc) throw std::invalid_argument("quadric_frame: not on the quadric");
  VecD re = normals * c.real(), im = normals * c.imag();
  MatD out(normals.rows(), 2);
  out.col(0) = re.normalized();
  VecD e = im - out.col(0) * out.col(0).dot(im);
  out.col(1) = e.normalized();
  return out;
}

// Random point on sum c_i^2 = 0: c = a + i b with |a| = |b|, a orthogonal to b.
inline VecC random_quadric_point(Eigen::Index n, Rng& rng) {
  MatD q = rng.gaussian(n, 2);
  MatD o = orthonormal_span(q);
  VecC c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = Complex(o(i, 0), o(i, 1));
  return c;
}

// Upper left (m_- - r) x (m_+ - r) blocks of B_l and C_l vanish; l >= 2 counts from n_0.
template <class T>
bool is_r_null_block(const SecondFormTensor<T>& t, int l, int r, double tol = kDefaultTol) {
  if (l < 2) throw std::invalid_argument("is_r_null_block: l must be at least 2");
  if (l > t.count()) throw std::out_of_range("is_r_null_block: l out of range");
  const auto rows = t.dim(kPlus) - r, cols = t.dim(kZero) - r;
  double b = max_abs(Mat<T>(t.B[l - 1].topLeftCorner(rows, cols)));
  double c = max_abs(Mat<T>(t.C[l - 1].topLeftCorner(rows, cols)));
  return is_exact_v<T> ? (b == 0.0 && c == 0.0) : std::max(b, c) <= tol;
}

// Max |p_l| over samples of the constraint set y_1 = i x_1, y_2 = -x_2,
// z_2 = sigma^{-1}(Delta + iota I) x_2, for both iota = +-i.
inline double r_null_definition_residual(const NormalizedPair& np, int l, int samples, Rng& rng) {
  const auto& t = np.tensor;
  if (l < 2) throw std::invalid_argument("is_r_null_definition: l must be at least 2");
  if (l > t.count()) throw std::out_of_range("is_r_null_definition: l out of range");
  const int r = np.data.r;
  const auto mp = t.dim(kPlus), mz = t.dim(kZero);
  MatC a = t.A[l - 1].cast<Complex>(), b = t.B[l - 1].cast<Complex>(), c = t.C[l - 1].cast<Complex>();
  MatC d = np.data.delta.cast<Complex>();
  VecC sig = np.data.sigma.cast<Complex>();
  double worst = 0.0;
  for (Complex iota : {Complex(0, 1), Complex(0, -1)}) {
    for (int k = 0; k < samples; ++k) {
      VecC x1 = rng.complex_gaussian(mp - r), x2 = rng.complex_gaussian(r), z1 = rng.complex_gaussian(mz - r);
      VecC x(mp), y(mp), z(mz);
      x << x1, x2;
      y << iota * x1, -x2;
      VecC z2 = (d + iota * MatC::Identity(r, r)) * x2;
      for (int i = 0; i < r; ++i) z2(i) /= sig(i);
      z << z1, z2;
      Complex p = 2.0 * (x.transpose() * a * y + x.transpose() * b * z + y.transpose() * c * z)(0, 0);
      double scale = 1.0 + x.squaredNorm() + z.squaredNorm();
      worst = std::max(worst, std::abs(p) / scale);
    }
  }
  return worst;
}

inline bool is_r_null_definition(const NormalizedPair& np, int l, int samples, Rng& rng,
                                 double tol = kDefaultTol) {
  return r_null_definition_residual(np, l, samples, rng) <= tol;
}

// Condition A by kernel dimension: dim of the common kernel of all S_a equals dim E_0.
template <class T>
bool detect_condition_A(const SecondFormTensor<T>& t, double tol = kDefaultTol) {
  std::vector<Mat<T>> s;
  for (int a = 0; a <= t.count(); ++a) s.push_back(t.assemble(a));
  return joint_kernel(s, tol).cols() == t.dim(kZero);
}

// Condition A by block vanishing: all B_a, C_a are zero.
template <class T>
bool condition_A_blocks(const SecondFormTensor<T>& t, double tol = kDefaultTol) {
  double worst = 0.0;
  for (int a = 0; a < t.count(); ++a) worst = std::max({worst, max_abs(t.B[a]), max_abs(t.C[a])});
  return is_exact_v<T> ? worst == 0.0 : worst <= tol;
}

struct SingularLocusDims {
  int generic = 0;     // complex kernel dimension of S_1 - iota S_0
  int degenerate = 0;  // x = y = 0 branch: dim E_0
};

inline SingularLocusDims singular_locus_dim(const SecondFormTensor<double>& t, Complex iota,
                                            double tol = kDefaultTol) {
  MatC m = t.assemble(1).cast<Complex>() - iota * t.assemble(0).cast<Complex>();
  return {static_cast<int>(kernel_basis(m, tol).cols()), static_cast<int>(t.dim(kZero))};
}

// Normalized tensor from data: (n_0, n_1) in normal form with the given sigma and skew Delta,
// remaining blocks drawn at random with zero upper left blocks when `null` is set.
inline SecondFormTensor<double> synthetic_pair_tensor(const VecD& sigma, const MatD& delta, int extra,
                                                      bool null, Rng& rng, int mp = 8, int mz = 7) {
  const auto r = sigma.size();
  SecondFormTensor<double> t;
  t.leaf = Leaf::plus;
  t.grams = {MatD::Identity(mp, mp), MatD::Identity(mp, mp), MatD::Identity(mz, mz)};
  MatD a1 = MatD::Identity(mp, mp), b1 = MatD::Zero(mp, mz);
  a1.bottomRightCorner(r, r) = delta;
  b1.bottomRightCorner(r, r) = sigma.asDiagonal();
  t.A.push_back(a1);
  t.B.push_back(b1);
  t.C.push_back(b1);
  for (int k = 0; k < extra; ++k) {
    MatD b = rng.gaussian(mp, mz), c = rng.gaussian(mp, mz);
    if (null) {
      b.topLeftCorner(mp - r, mz - r).setZero();
      c.topLeftCorner(mp - r, mz - r).setZero();
    }
    t.A.push_back(rng.gaussian(mp, mp));
    t.B.push_back(b);
    t.C.push_back(c);
  }
  return t;
}

// Spectral data wrapper for a hand-built normalized tensor.
inline NormalizedPair as_normalized(const SecondFormTensor<double>& t, const VecD& sigma, const MatD& delta) {
  NormalizedPair np;
  np.tensor = t;
  np.data.r = static_cast<int>(sigma.size());
  np.data.sigma = sigma;
  np.data.delta = delta;
  return np;
}

// Rotations preserving the normal form: the same R on the unpaired E_+ and E_- parts and any
// R' on the unpaired E_0 part.
inline SecondFormTensor<double> normal_form_rotation(const SecondFormTensor<double>& t, int r, Rng& rng) {
  const auto mp = t.dim(kPlus), mz = t.dim(kZero);
  MatD up = MatD::Identity(mp, mp), u0 = MatD::Identity(mz, mz);
  up.topLeftCorner(mp - r, mp - r) = rng.orthogonal(mp - r);
  u0.topLeftCorner(mz - r, mz - r) = rng.orthogonal(mz - r);
  return change_bases(t, up, up, u0);
}

// Orthogonal mix of the normals l >= 2 (n_0 and n_1 fixed).
inline SecondFormTensor<double> mix_higher_normals(const SecondFormTensor<double>& t, Rng& rng) {
  const int k = t.count();
  MatD r = MatD::Identity(k, k);
  if (k > 1) r.bottomRightCorner(k - 1, k - 1) = rng.orthogonal(k - 1);
  return mix_normals(t, r);
}

// Orthogonal mix with a random first column, so the pair becomes (n_0, random unit n_1).
inline SecondFormTensor<double> random_pair(const SecondFormTensor<double>& t, Rng& rng) {
  return mix_normals(t, MatD(rng.orthogonal(t.count())));
}

}  // namespace fkm

#endif  // FKM_NORMALIZATION_HPP
