#ifndef FKM_MIRROR_HPP
#define FKM_MIRROR_HPP

#include "fkm/normalization.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkm {

// (x, n) on the unit normal bundle of M_+ with its frame, blocks and the data
// a_sharp[p] = S^p_{alpha mu}: the plus form at n in the normal direction e_p (of E_0) on (E_+, E_-).
struct MirrorTriple {
  FocalFrame<double> frame;
  SecondFormTensor<double> tensor;
  std::vector<MatD> a_sharp;

  const VecD& x() const { return frame.x; }
  VecD n() const { return frame.normals.col(0); }
  VecD x_star() const { return std::sqrt(0.5) * (x() + n()); }
  VecD n_star() const { return std::sqrt(0.5) * (x() - n()); }
};

inline std::vector<MatD> sharp_a_blocks(const FocalFrame<double>& f) {
  std::vector<MatD> out;
  VecD n = f.normals.col(0);
  for (Eigen::Index p = 0; p < f.E0.cols(); ++p)
    out.push_back(f.Ep.transpose() * plus_ambient_form(f.P, n, VecD(f.E0.col(p))) * f.Em);
  return out;
}

inline MirrorTriple make_mirror_triple(const FocalFrame<double>& plus) {
  if (plus.leaf != Leaf::plus) throw std::invalid_argument("make_mirror_triple: frame is not on M_+");
  return {plus, block_decompose(plus), sharp_a_blocks(plus)};
}

// Frame at (x^#, n^#) = (n, x): normals (x, E_0), eigenspaces (E_+, E_-, normals of x).
inline FocalFrame<double> sharp_frame(const FocalFrame<double>& f) {
  FocalFrame<double> s;
  s.leaf = Leaf::plus;
  s.P = f.P;
  s.x = f.normals.col(0);
  s.normals = hstack<double>({MatD(f.x), f.E0});
  s.Ep = f.Ep;
  s.Em = f.Em;
  s.E0 = f.normals.rightCols(f.normals.cols() - 1);
  return s;
}

// Frame at (x^*, n^*): normals (n^*, E_+), E_+^* = normals of x, E_-^* = E_0, E_0^* = E_-.
inline FocalFrame<double> star_frame(const FocalFrame<double>& f) {
  const double r = std::sqrt(0.5);
  VecD n = f.normals.col(0);
  FocalFrame<double> s;
  s.leaf = Leaf::minus;
  s.P = f.P;
  s.x = r * (f.x + n);
  s.normals = hstack<double>({MatD(r * (f.x - n)), f.Ep});
  s.Ep = f.normals.rightCols(f.normals.cols() - 1);
  s.Em = f.E0;
  s.E0 = f.Em;
  return s;
}

// A^#_p = a_sharp[p], B^#_p[alpha][a] = B_a[alpha][p], C^#_p[mu][a] = -C_a[mu][p]; the new
// a_sharp is the old A.
inline MirrorTriple transport_sharp(const MirrorTriple& m) {
  const auto& t = m.tensor;
  const int k = t.count();
  const auto mz = t.dim(kZero);
  MirrorTriple s;
  s.frame = sharp_frame(m.frame);
  s.tensor.leaf = Leaf::plus;
  s.tensor.grams = {t.grams[kPlus], t.grams[kMinus], MatD::Identity(k, k)};
  for (Eigen::Index p = 0; p < mz; ++p) {
    MatD b(t.dim(kPlus), k), c(t.dim(kMinus), k);
    for (int a = 0; a < k; ++a) {
      b.col(a) = t.B[a].col(p);
      c.col(a) = -t.C[a].col(p);
    }
    s.tensor.A.push_back(m.a_sharp[p]);
    s.tensor.B.push_back(b);
    s.tensor.C.push_back(c);
  }
  s.a_sharp = t.A;
  return s;
}

struct StarTransport {
  FocalFrame<double> frame;
  SecondFormTensor<double> tensor;
};

// A*_alpha[a][p] = -sqrt2 B_a[alpha][p], B*_alpha[a][mu] = -A_a[alpha][mu]/sqrt2,
// C*_alpha[p][mu] = -a_sharp[p][alpha][mu]/sqrt2.
inline StarTransport transport_star(const MirrorTriple& m) {
  const auto& t = m.tensor;
  const int k = t.count();
  const auto mp = t.dim(kPlus), mm = t.dim(kMinus), mz = t.dim(kZero);
  const double r2 = std::sqrt(2.0);
  StarTransport s;
  s.frame = star_frame(m.frame);
  s.tensor.leaf = Leaf::minus;
  s.tensor.grams = {MatD::Identity(k, k), MatD::Identity(mz, mz), MatD::Identity(mm, mm)};
  for (Eigen::Index al = 0; al < mp; ++al) {
    MatD a(k, mz), b(k, mm), c(mz, mm);
    for (int i = 0; i < k; ++i) {
      a.row(i) = -r2 * t.B[i].row(al);
      b.row(i) = -t.A[i].row(al) / r2;
    }
    for (Eigen::Index p = 0; p < mz; ++p) c.row(p) = -m.a_sharp[p].row(al) / r2;
    s.tensor.A.push_back(a);
    s.tensor.B.push_back(b);
    s.tensor.C.push_back(c);
  }
  return s;
}

inline double tensor_distance(const SecondFormTensor<double>& a, const SecondFormTensor<double>& b) {
  if (a.count() != b.count()) throw std::invalid_argument("tensor_distance: normal counts differ");
  double worst = 0.0;
  for (int i = 0; i < a.count(); ++i) {
    if (a.A[i].rows() != b.A[i].rows() || a.A[i].cols() != b.A[i].cols() || a.B[i].cols() != b.B[i].cols())
      throw std::invalid_argument("tensor_distance: block sizes differ");
    worst = std::max({worst, max_abs(MatD(a.A[i] - b.A[i])), max_abs(MatD(a.B[i] - b.B[i])),
                      max_abs(MatD(a.C[i] - b.C[i]))});
  }
  return worst;
}

inline bool tensors_identical(const SecondFormTensor<double>& a, const SecondFormTensor<double>& b) {
  if (a.count() != b.count()) return false;
  for (int i = 0; i < a.count(); ++i)
    if (a.A[i] != b.A[i] || a.B[i] != b.B[i] || a.C[i] != b.C[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------------------------
// Block patterns

enum class BlockKind { A, B, C };

struct ZeroBlock {
  BlockKind kind;
  int first_normal, last_normal;  // inclusive, 0-based indices into t.A/B/C
  int row, rows, col, cols;
};

struct BlockPattern {
  std::string name;
  Eigen::Index rows_a, cols_a, rows_bc, cols_b, cols_c;
  int normals;
  std::vector<ZeroBlock> zeros;
};

struct PatternResult {
  bool ok = false;
  double max_entry = 0.0;
  std::string where;
};

inline PatternResult validate_pattern(const SecondFormTensor<double>& t, const BlockPattern& p,
                                      double tol = 1e-10) {
  if (t.count() != p.normals || t.A[0].rows() != p.rows_a || t.A[0].cols() != p.cols_a ||
      t.B[0].rows() != p.rows_bc || t.B[0].cols() != p.cols_b || t.C[0].cols() != p.cols_c)
    throw std::invalid_argument("validate_pattern: tensor dimensions do not match " + p.name);
  PatternResult res;
  for (const auto& z : p.zeros) {
    for (int a = z.first_normal; a <= z.last_normal; ++a) {
      const MatD& m = z.kind == BlockKind::A ? t.A[a] : z.kind == BlockKind::B ? t.B[a] : t.C[a];
      if (z.row + z.rows > m.rows() || z.col + z.cols > m.cols())
        throw std::invalid_argument("validate_pattern: block outside matrix in " + p.name);
      double v = max_abs(MatD(m.block(z.row, z.col, z.rows, z.cols)));
      if (v > res.max_entry) {
        res.max_entry = v;
        const char* kn = z.kind == BlockKind::A ? "A" : z.kind == BlockKind::B ? "B" : "C";
        res.where = std::string(kn) + "_" + std::to_string(a + 1) + "[" + std::to_string(z.row) + ":" +
                    std::to_string(z.row + z.rows) + "," + std::to_string(z.col) + ":" +
                    std::to_string(z.col + z.cols) + "]";
      }
    }
  }
  res.ok = res.max_entry <= tol;
  return res;
}

// Adapted frame on M_+: normals a = 1..3 carry A = diag(z, w) with B, C supported in the lower
// right 4x4 block; normals a = 4..7 have vanishing upper left blocks; all third columns of B vanish.
inline BlockPattern mtx_pattern() {
  BlockPattern p{"adapted", 8, 8, 8, 7, 7, 7, {}};
  p.zeros.push_back({BlockKind::A, 0, 2, 0, 4, 4, 4});
  p.zeros.push_back({BlockKind::A, 0, 2, 4, 4, 0, 4});
  for (auto k : {BlockKind::B, BlockKind::C}) {
    p.zeros.push_back({k, 0, 2, 0, 4, 0, 7});
    p.zeros.push_back({k, 0, 2, 0, 8, 0, 3});
    p.zeros.push_back({k, 3, 6, 0, 4, 0, 3});
  }
  p.zeros.push_back({BlockKind::A, 3, 6, 0, 4, 0, 4});
  p.zeros.push_back({BlockKind::B, 0, 6, 0, 8, 2, 1});
  return p;
}

// Star data of the adapted frame at x^*: rows a split 3+4, columns p split 3+4, columns mu 4+4.
inline BlockPattern good_pattern() {
  BlockPattern p{"star", 7, 7, 7, 8, 8, 8, {}};
  p.zeros.push_back({BlockKind::A, 0, 3, 0, 3, 0, 7});
  p.zeros.push_back({BlockKind::A, 0, 3, 3, 4, 0, 3});
  for (auto k : {BlockKind::B, BlockKind::C}) {
    p.zeros.push_back({k, 0, 3, 0, 3, 4, 4});
    p.zeros.push_back({k, 0, 3, 3, 4, 0, 4});
    p.zeros.push_back({k, 4, 7, 0, 3, 0, 4});
  }
  p.zeros.push_back({BlockKind::A, 4, 7, 0, 3, 0, 3});
  return p;
}

// ---------------------------------------------------------------------------------------------
// Adapted frame

struct AdaptedFrame {
  FocalFrame<double> frame;
  double s = 0.0, a = 0.0, b = 0.0;
  MatD uk, wk, f, vk;  // kernel parts of E_+, E_-, the sigma part of E_+, and (e1, e2, v) in E_0
};

// Builds the adapted frame from any frame at (x, n_0) on M_+. Throws when the data do not
// admit it (rank of B_1 not 4, or kernel dimensions off).
inline AdaptedFrame adapted_frame(const FocalFrame<double>& plus, Rng& rng, double tol = 1e-9) {
  if (plus.leaf != Leaf::plus) throw std::invalid_argument("adapted_frame: frame is not on M_+");
  const auto d = plus.x.size();
  MatD np = plus.normals.rightCols(plus.normals.cols() - 1);
  const MatD &ep = plus.Ep, &em = plus.Em, &e0 = plus.E0;
  auto S = [&](const VecD& n, const MatD& X, const MatD& Y) { return plus.form(n, X, Y); };
  auto vec = [](const MatD& m) { return Eigen::Map<const VecD>(m.data(), m.size()); };
  const int k = static_cast<int>(np.cols());

  MatD mb(ep.cols() * e0.cols(), k);
  std::vector<MatD> bs;
  for (int i = 0; i < k; ++i) {
    bs.push_back(S(np.col(i), ep, e0));
    mb.col(i) = vec(bs.back());
  }
  MatD kb = kernel_basis(mb, tol);
  if (kb.cols() != 1) throw std::runtime_error("adapted_frame: B-null normal direction not unique");
  VecD nb = (np * kb.col(0)).normalized();

  VecD c = np * (np.transpose() * rng.gaussian(d));
  c -= nb * nb.dot(c);
  VecD n1 = c.normalized();
  MatD b1 = S(n1, ep, e0), c1 = S(n1, em, e0), a1 = S(n1, ep, em);
  Eigen::JacobiSVD<MatD> svd(b1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VecD sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, sv(0))) ++r;
  if (r != 4) throw std::runtime_error("adapted_frame: rank of B_1 is " + std::to_string(r) + ", expected 4");
  MatD u = svd.matrixU(), v = svd.matrixV();
  AdaptedFrame out;
  out.uk = ep * u.rightCols(ep.cols() - r);
  MatD vk = e0 * v.rightCols(e0.cols() - r);
  MatD cv = c1 * v.leftCols(r);
  for (int i = 0; i < r; ++i) cv.col(i) /= sv(i);
  MatD wpart = em * cv;
  out.wk = orthonormal_span(MatD(em * kernel_basis(MatD(wpart.transpose() * em), tol)));
  out.wk = out.wk * S(n1, out.uk, out.wk).transpose();

  MatD rows(k, 2 * out.uk.cols() * e0.cols());
  for (int i = 0; i < k; ++i) {
    MatD p1 = S(np.col(i), out.uk, e0), p2 = S(np.col(i), out.wk, e0);
    rows.row(i) << vec(p1).transpose(), vec(p2).transpose();
  }
  MatD kspan = np * orthonormal_span(kernel_basis(MatD(rows.transpose()), tol));
  if (kspan.cols() != 3) throw std::runtime_error("adapted_frame: expected a 3-dim normal subspace");
  VecD n2 = kspan * (kspan.transpose() * rng.gaussian(d));
  n2 -= n1 * n1.dot(n2) + nb * nb.dot(n2);
  n2.normalize();
  MatD trio(d, 3);
  trio << n1, n2, nb;
  MatD comp = orthonormal_span(MatD(np * kernel_basis(MatD(trio.transpose() * np), tol)));

  MatD kv = kernel_basis(vstack<double>(bs), tol);
  if (kv.cols() != 1) throw std::runtime_error("adapted_frame: common kernel of B_a not 1-dim");
  VecD vv = e0 * kv.col(0);
  VecD e1 = vk * (vk.transpose() * rng.gaussian(d));
  e1 -= vv * vv.dot(e1);
  e1.normalize();
  MatD ev(d, 2);
  ev << e1, vv;
  VecD e2 = vk * kernel_basis(MatD(ev.transpose() * vk), tol).col(0);
  out.s = sv(0);
  MatD f = ep * u.leftCols(r);

  auto coeff = [&](const VecD& e) {
    MatD m(4, 4);
    for (int al = 0; al < 4; ++al)
      for (int a = 0; a < 4; ++a) m(al, a) = S(comp.col(a), MatD(f.col(al)), MatD(e))(0, 0);
    return m;
  };
  MatD c1s = coeff(e1);
  VecD ss = Eigen::JacobiSVD<MatD>(c1s).singularValues();
  if (ss(0) - ss(3) > 1e-8) throw std::runtime_error("adapted_frame: c-block is not conformal");
  comp = comp * (ss(0) * c1s.inverse());
  MatD c2s = coeff(e2);
  MatD sym = 0.5 * (c2s + c2s.transpose()), kk = 0.5 * (c2s - c2s.transpose());
  out.a = sym.trace() / 4.0;
  out.b = std::sqrt(std::max(0.0, -(kk * kk).trace() / 4.0));
  if (out.b < 1e-8) throw std::runtime_error("adapted_frame: degenerate complex structure");
  VecD g1 = VecD::Unit(4, 0), g2 = kk * g1 / out.b;
  MatD g12(4, 2);
  g12 << g1, g2;
  VecD g3 = kernel_basis(MatD(g12.transpose()), tol).col(0);
  VecD g4 = -kk * g3 / out.b;
  MatD rot(4, 4);
  rot << g1, g2, g3, g4;
  f = f * rot;
  comp = comp * rot;
  MatD vr = e0 * S(n1, f, e0).transpose() / out.s;
  MatD wr = em * S(n1, em, vr) / out.s;

  out.f = f;
  out.vk = MatD(d, 3);
  out.vk << e1, e2, vv;
  out.frame.leaf = Leaf::plus;
  out.frame.P = plus.P;
  out.frame.x = plus.x;
  out.frame.normals = hstack<double>({MatD(plus.normals.col(0)), trio, comp});
  out.frame.Ep = hstack<double>({out.uk, f});
  out.frame.Em = hstack<double>({out.wk, wr});
  out.frame.E0 = hstack<double>({out.vk, vr});
  if (frame_gram_residual(out.frame) > 1e-8) throw std::runtime_error("adapted_frame: frame not orthonormal");
  return out;
}

// Relations of the adapted blocks: b_a = B_a[4:8,0:3] equals C_a[4:8,0:3] and the lower right
// 4x4 blocks of B_a and C_a agree.
inline double adapted_relations_residual(const SecondFormTensor<double>& t) {
  double worst = 0.0;
  for (int a = 0; a < t.count(); ++a)
    worst = std::max(worst, max_abs(MatD(t.B[a].bottomRows(4) - t.C[a].bottomRows(4))));
  return worst;
}

// b_4..b_7 = B_a[4:8, 0:3] for a = 4..7 (1-based).
inline std::vector<MatD> b_generators(const SecondFormTensor<double>& t) {
  std::vector<MatD> out;
  for (int a = 3; a < 7; ++a) out.push_back(t.B[a].block(4, 0, 4, 3));
  return out;
}
inline std::vector<MatD> d_generators(const SecondFormTensor<double>& t) {
  std::vector<MatD> out;
  for (int a = 3; a < 7; ++a) out.push_back(t.B[a].block(0, 3, 4, 4));
  return out;
}
inline std::vector<MatD> g_generators(const SecondFormTensor<double>& t) {
  std::vector<MatD> out;
  for (int a = 3; a < 7; ++a) out.push_back(t.C[a].block(0, 3, 4, 4));
  return out;
}

// Normal form of b_4..b_7 in terms of (s, a, b), lower sign convention.
inline std::vector<MatD> b_templates(double s, double a, double b) {
  std::vector<MatD> t(4, MatD::Zero(4, 3));
  t[0].row(0) << s, a, 0;
  t[0].row(1) << 0, b, 0;
  t[1].row(0) << 0, -b, 0;
  t[1].row(1) << s, a, 0;
  t[2].row(2) << s, a, 0;
  t[2].row(3) << 0, -b, 0;
  t[3].row(2) << 0, b, 0;
  t[3].row(3) << s, a, 0;
  return t;
}

inline double b_template_residual(const SecondFormTensor<double>& t, double s, double a, double b) {
  auto gens = b_generators(t);
  auto tpl = b_templates(s, a, b);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, max_abs(MatD(gens[i] - tpl[i])));
  return worst;
}

// The [3,4,8] multiplication G_a = (sqrt2 c_a | w_a), a = 1..3, from the adapted blocks.
inline OrthogonalMultiplication<double> extract_348_multiplication(const SecondFormTensor<double>& t) {
  OrthogonalMultiplication<double> om{3, 4, 8, {}};
  for (int a = 0; a < 3; ++a) {
    MatD g(4, 8);
    g << std::sqrt(2.0) * t.B[a].block(4, 3, 4, 4), t.A[a].block(4, 4, 4, 4);
    om.F.push_back(g);
  }
  return om;
}

// ---------------------------------------------------------------------------------------------
// Frame symmetries: Q with B_a = Q C_a and A_a Q^t skew, fitted by linear least squares.

struct FrameSymmetry {
  MatD Q;
  double fit_residual = 0.0;
  Eigen::Index rank = 0;
  double orthogonality = 0.0;  // |Q Q^t - I|
  double b_equals_qc = 0.0;    // max |B_a - Q C_a|
  double a_skew = 0.0;         // max |A_a Q^t + Q A_a^t|
  double a_sharp_skew = 0.0;   // max |A#_p Q^t + Q A#_p^t|
  double z_skew = 0.0;         // max |z + z^t| over the upper left 4x4 z of A_a Q^t, a = 1..3
};

inline FrameSymmetry validate_frame_symmetries(const SecondFormTensor<double>& t,
                                               const std::vector<MatD>& a_sharp, double tol = 1e-10) {
  if (!validate_pattern(t, mtx_pattern(), tol).ok)
    throw std::invalid_argument("validate_frame_symmetries: data not in adapted form");
  const int n = static_cast<int>(t.dim(kPlus));
  const int nz = static_cast<int>(t.dim(kZero));
  const int k = t.count();
  const int eqs = k * (n * nz + n * n);
  MatD lhs = MatD::Zero(eqs, n * n);
  VecD rhs = VecD::Zero(eqs);
  int row = 0;
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < nz; ++c, ++row) {
        lhs.block(row, i * n, 1, n) = t.C[a].col(c).transpose();
        rhs(row) = t.B[a](i, c);
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++row) {
        lhs.block(row, j * n, 1, n) += t.A[a].row(i);
        lhs.block(row, i * n, 1, n) += t.A[a].row(j);
      }
  }
  Eigen::CompleteOrthogonalDecomposition<MatD> cod(lhs);
  cod.setThreshold(1e-10);
  VecD q = cod.solve(rhs);
  FrameSymmetry fs;
  fs.rank = cod.rank();
  fs.fit_residual = (lhs * q - rhs).cwiseAbs().maxCoeff();
  fs.Q = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(q.data(), n, n);
  fs.orthogonality = max_abs(MatD(fs.Q * fs.Q.transpose() - MatD::Identity(n, n)));
  for (int a = 0; a < k; ++a) {
    fs.b_equals_qc = std::max(fs.b_equals_qc, max_abs(MatD(t.B[a] - fs.Q * t.C[a])));
    MatD aq = t.A[a] * fs.Q.transpose();
    fs.a_skew = std::max(fs.a_skew, max_abs(MatD(aq + aq.transpose())));
  }
  for (const auto& m : a_sharp) {
    MatD aq = m * fs.Q.transpose();
    fs.a_sharp_skew = std::max(fs.a_sharp_skew, max_abs(MatD(aq + aq.transpose())));
  }
  for (int a = 0; a < std::min(3, k); ++a) {
    MatD z = MatD(t.A[a] * fs.Q.transpose()).topLeftCorner(4, 4);
    fs.z_skew = std::max(fs.z_skew, max_abs(MatD(z + z.transpose())));
  }
  return fs;
}

// ---------------------------------------------------------------------------------------------
// Signed permutation matching: P_r M_a P_c = scale * T_a for all a.

struct SignedPermutationMatch {
  bool found = false;
  double scale = 0.0;
  double residual = 0.0;
  std::vector<int> row_map, col_map;  // template index -> source index
  std::vector<int> row_sign, col_sign;
};

inline SignedPermutationMatch match_signed_permutation(const std::vector<MatD>& m,
                                                       const std::vector<MatD>& tpl, double tol = 1e-10) {
  if (m.size() != tpl.size() || m.empty()) throw std::invalid_argument("match: list sizes differ");
  const auto rows = m[0].rows(), cols = m[0].cols();
  for (std::size_t a = 0; a < m.size(); ++a)
    if (m[a].rows() != rows || m[a].cols() != cols || tpl[a].rows() != rows || tpl[a].cols() != cols)
      throw std::invalid_argument("match: matrix sizes differ");
  double nm = 0.0, nt = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    nm += m[a].squaredNorm();
    nt += tpl[a].squaredNorm();
  }
  SignedPermutationMatch res;
  if (nt == 0.0) throw std::invalid_argument("match: zero templates");
  res.scale = std::sqrt(nm / nt);
  const double sc = res.scale;
  const double etol = tol * std::max(1.0, sc);
  const std::size_t na = m.size();

  std::vector<int> pc(cols);
  std::iota(pc.begin(), pc.end(), 0);
  std::vector<int> pr(rows, -1);
  std::vector<bool> used(rows, false);

  auto abs_row_ok = [&](int ti, int si) {
    for (std::size_t a = 0; a < na; ++a)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (std::abs(std::abs(m[a](si, pc[j])) - sc * std::abs(tpl[a](ti, j))) > etol) return false;
    return true;
  };
  // Signs: s_r(i) s_c(j) m = sc * t on every nonzero entry; propagate over the bipartite graph.
  auto solve_signs = [&](std::vector<int>& rs, std::vector<int>& cs) {
    rs.assign(rows, 0);
    cs.assign(cols, 0);
    for (Eigen::Index start = 0; start < rows; ++start) {
      if (rs[start]) continue;
      rs[start] = 1;
      std::vector<std::pair<bool, int>> stack{{true, static_cast<int>(start)}};
      while (!stack.empty()) {
        auto [is_row, idx] = stack.back();
        stack.pop_back();
        for (std::size_t a = 0; a < na; ++a) {
          if (is_row) {
            for (Eigen::Index j = 0; j < cols; ++j) {
              double t = tpl[a](idx, j), v = m[a](pr[idx], pc[j]);
              if (std::abs(t) * sc <= etol) continue;
              int need = (t * v > 0 ? 1 : -1) * rs[idx];
              if (!cs[j]) {
                cs[j] = need;
                stack.push_back({false, static_cast<int>(j)});
              } else if (cs[j] != need) {
                return false;
              }
            }
          } else {
            for (Eigen::Index i = 0; i < rows; ++i) {
              double t = tpl[a](i, idx), v = m[a](pr[i], pc[idx]);
              if (std::abs(t) * sc <= etol) continue;
              int need = (t * v > 0 ? 1 : -1) * cs[idx];
              if (!rs[i]) {
                rs[i] = need;
                stack.push_back({true, static_cast<int>(i)});
              } else if (rs[i] != need) {
                return false;
              }
            }
          }
        }
      }
    }
    for (auto& s : cs)
      if (!s) s = 1;
    return true;
  };
  std::function<bool(Eigen::Index)> assign_rows = [&](Eigen::Index ti) -> bool {
    if (ti == rows) {
      std::vector<int> rs, cs;
      if (!solve_signs(rs, cs)) return false;
      res.row_sign = rs;
      res.col_sign = cs;
      return true;
    }
    for (Eigen::Index si = 0; si < rows; ++si) {
      if (used[si] || !abs_row_ok(static_cast<int>(ti), static_cast<int>(si))) continue;
      used[si] = true;
      pr[ti] = static_cast<int>(si);
      if (assign_rows(ti + 1)) return true;
      used[si] = false;
    }
    return false;
  };
  do {
    std::fill(used.begin(), used.end(), false);
    if (assign_rows(0)) {
      res.found = true;
      res.row_map = pr;
      res.col_map = pc;
      break;
    }
  } while (std::next_permutation(pc.begin(), pc.end()));
  if (!res.found) return res;
  for (std::size_t a = 0; a < na; ++a)
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        double v = res.row_sign[i] * res.col_sign[j] * m[a](res.row_map[i], res.col_map[j]);
        res.residual = std::max(res.residual, std::abs(v - sc * tpl[a](i, j)));
      }
  return res;
}

// ---------------------------------------------------------------------------------------------
// Worked example on the right-multiplication family.

// Displayed templates: row blocks 2,2,2,2, column blocks 1,2,2,2.
inline std::vector<MatD> example_templates() {
  MatD I = MatD::Identity(2, 2), J(2, 2), K(2, 2), L(2, 2);
  J << 0, 1, -1, 0;
  K << 0, 1, 1, 0;
  L << 1, 0, 0, -1;
  // Every displayed block sits in a 2-wide column block (cb >= 2).
  auto put = [](MatD& m, int rb, int cb, const MatD& blk) { m.block(2 * (rb - 1), 1 + 2 * (cb - 2), 2, 2) = blk; };
  std::vector<MatD> t(7, MatD::Zero(8, 7));
  put(t[0], 3, 3, I);
  put(t[0], 4, 4, I);
  put(t[1], 3, 3, J);
  put(t[1], 4, 4, -J);
  put(t[3], 1, 3, L);
  put(t[3], 4, 2, I);
  put(t[4], 1, 3, K);
  put(t[4], 4, 2, -J);
  put(t[5], 1, 4, I);
  put(t[5], 3, 2, -L);
  put(t[6], 1, 4, J);
  put(t[6], 3, 2, -K);
  return t;
}

struct ExampleReproduction {
  double literal_membership = 0.0;   // residual of the printed point
  double corrected_membership = 0.0;
  double basis_residual = 0.0;       // displayed bases inside E_+^*, E_-^* of the computed frame
  double b3_norm = 0.0;
  std::vector<MatD> B;               // converted B_1..B_7
  SignedPermutationMatch match;
};

inline VecD example_point(int eta_second) {
  VecD x = VecD::Zero(32);
  x(0) = 0.5;
  x(8 + 1) = 0.5;
  x(16 + 3) = 0.5;
  x(24 + eta_second) = 0.5;
  return x;
}

inline ExampleReproduction reproduce_example(double tol = 1e-10) {
  auto sys = fkm_system<double>(Side::right);
  ExampleReproduction ex;
  ex.literal_membership = clifford_stiefel_residual(sys, example_point(4));
  VecD xs = example_point(2);
  ex.corrected_membership = clifford_stiefel_residual(sys, xs);
  auto frame = focal_frame_at(sys, xs, VecD(VecD::Unit(9, 0)), tol);

  auto oct = [](int a) { return oct_basis<double>(a); };
  auto mul = [](const Octonion<double>& p, const Octonion<double>& q) { return oct_mul(p, q); };
  const double r = std::sqrt(0.5);
  std::vector<VecD> xa, yp;
  for (int a = 0; a < 8; ++a) {
    if (a == 2) continue;
    VecD v = VecD::Zero(32);
    v.segment(16, 8) = r * to_vec(mul(oct(1), oct(a)));
    v.segment(24, 8) = r * to_vec(oct(a));
    xa.push_back(v);
  }
  for (int p = 0; p < 8; ++p) {
    if (p == 1) continue;
    VecD v = VecD::Zero(32);
    v.segment(0, 8) = r * to_vec(mul(oct(3), mul(oct(2), oct(p))));
    v.segment(8, 8) = r * to_vec(oct(p));
    yp.push_back(v);
  }
  auto inside = [](const MatD& span, const VecD& v) { return (span * (span.transpose() * v) - v).norm(); };
  for (const auto& v : xa) ex.basis_residual = std::max(ex.basis_residual, inside(frame.Ep, v));
  for (const auto& v : yp) ex.basis_residual = std::max(ex.basis_residual, inside(frame.Em, v));

  // A*_alpha[a][p] = S*_{P_alpha x}(X_a, Y_p) and B_a[alpha][p] = -A*_alpha[a][p] / sqrt2.
  for (std::size_t a = 0; a < xa.size(); ++a) {
    MatD b(8, 7);
    for (int al = 1; al <= 8; ++al)
      for (std::size_t p = 0; p < yp.size(); ++p) {
        VecD n = frame.P[al] * xs;
        double astar = xa[a].dot(minus_ambient_form(frame.P, xs, n) * yp[p]);
        b(al - 1, static_cast<Eigen::Index>(p)) = -astar * r;
      }
    ex.B.push_back(b);
  }
  ex.b3_norm = max_abs(ex.B[2]);
  ex.match = match_signed_permutation(ex.B, example_templates(), tol);
  return ex;
}

}  // namespace fkm

#endif  // FKM_MIRROR_HPP
