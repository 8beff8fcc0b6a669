#ifndef FKM_FORMS_HPP
#define FKM_FORMS_HPP

#include "fkm/focal.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fkm {

// Eigenspace labels of S_{n_0}.
enum Space { kPlus = 0, kMinus = 1, kZero = 2 };

// Blocks of S_a = [[0, A_a, B_a], [A_a^t, 0, C_a], [B_a^t, C_a^t, 0]] for the normals n_1..n_k,
// with S_0 = diag(G_+, -G_-, 0). All blocks are bilinear forms in the frame bases; grams[s]
// is the Gram matrix of eigenspace s (identity for orthonormal frames).
template <class T>
struct SecondFormTensor {
  Leaf leaf = Leaf::plus;
  std::vector<Mat<T>> A, B, C;
  std::array<Mat<T>, 3> grams;

  int count() const { return static_cast<int>(A.size()); }
  Eigen::Index dim(Space s) const { return grams[s].rows(); }
  Eigen::Index tangent_dim() const { return dim(kPlus) + dim(kMinus) + dim(kZero); }

  bool orthonormal() const {
    for (const auto& g : grams) {
      double r = max_abs(Mat<T>(g - Mat<T>::Identity(g.rows(), g.cols())));
      if (is_exact_v<T> ? r != 0.0 : r > 1e-12) return false;
    }
    return true;
  }

  // S_a as a form on E_+ + E_- + E_0, a = 0..count().
  Mat<T> assemble(int a) const {
    const auto p = dim(kPlus), m = dim(kMinus), z = dim(kZero), n = p + m + z;
    Mat<T> s = Mat<T>::Zero(n, n);
    if (a == 0) {
      s.block(0, 0, p, p) = grams[kPlus];
      s.block(p, p, m, m) = -grams[kMinus];
      return s;
    }
    if (a < 1 || a > count()) throw std::out_of_range("assemble: normal index out of range");
    const auto& ba = B[a - 1];
    s.block(0, p, p, m) = A[a - 1];
    s.block(0, p + m, p, z) = ba;
    s.block(p, p + m, m, z) = C[a - 1];
    s.block(p, 0, m, p) = A[a - 1].transpose();
    s.block(p + m, 0, z, p) = ba.transpose();
    s.block(p + m, p, z, m) = C[a - 1].transpose();
    return s;
  }

  // Form to operator: G^{-1} S_a.
  Mat<T> operator_matrix(int a) const {
    Mat<T> s = assemble(a);
    if (orthonormal()) return s;
    Mat<T> g = Mat<T>::Zero(s.rows(), s.cols());
    const auto p = dim(kPlus), m = dim(kMinus), z = dim(kZero);
    g.block(0, 0, p, p) = grams[kPlus];
    g.block(p, p, m, m) = grams[kMinus];
    g.block(p + m, p + m, z, z) = grams[kZero];
    return inverse(g) * s;
  }
};

template <class T>
SecondFormTensor<T> block_decompose(const FocalFrame<T>& f) {
  const auto d = f.x.size();
  if (f.normals.rows() != d || f.Ep.rows() != d || f.Em.rows() != d || f.E0.rows() != d)
    throw std::invalid_argument("block_decompose: frame dimension mismatch");
  if (f.P.empty() || f.P.front().rows() != d)
    throw std::invalid_argument("block_decompose: frame and system mismatch");
  SecondFormTensor<T> t;
  t.leaf = f.leaf;
  t.grams = {Mat<T>(f.Ep.transpose() * f.Ep), Mat<T>(f.Em.transpose() * f.Em),
             Mat<T>(f.E0.transpose() * f.E0)};
  for (Eigen::Index a = 1; a < f.normals.cols(); ++a) {
    Mat<T> k = f.ambient_form(f.normals.col(a));
    t.A.push_back(f.Ep.transpose() * k * f.Em);
    t.B.push_back(f.Ep.transpose() * k * f.E0);
    t.C.push_back(f.Em.transpose() * k * f.E0);
  }
  return t;
}

// max_a |T^t K_{n_a} T - assemble(a)| over all normals including n_0.
template <class T>
double reassembly_residual(const FocalFrame<T>& f, const SecondFormTensor<T>& t) {
  Mat<T> tb = f.tangent();
  double worst = 0.0;
  for (int a = 0; a <= t.count(); ++a) {
    Mat<T> direct = tb.transpose() * f.ambient_form(f.normals.col(a)) * tb;
    worst = std::max(worst, max_abs(Mat<T>(direct - t.assemble(a))));
  }
  return worst;
}

// New normals n'_b = sum_a R_ab n_a over n_1..n_k (n_0 fixed).
template <class T>
SecondFormTensor<T> mix_normals(const SecondFormTensor<T>& t, const Mat<T>& r) {
  if (r.rows() != t.count()) throw std::invalid_argument("mix_normals: wrong size");
  SecondFormTensor<T> out;
  out.leaf = t.leaf;
  out.grams = t.grams;
  for (Eigen::Index b = 0; b < r.cols(); ++b) {
    Mat<T> a = Mat<T>::Zero(t.dim(kPlus), t.dim(kMinus));
    Mat<T> bb = Mat<T>::Zero(t.dim(kPlus), t.dim(kZero));
    Mat<T> c = Mat<T>::Zero(t.dim(kMinus), t.dim(kZero));
    for (int k = 0; k < t.count(); ++k) {
      a += r(k, b) * t.A[k];
      bb += r(k, b) * t.B[k];
      c += r(k, b) * t.C[k];
    }
    out.A.push_back(a);
    out.B.push_back(bb);
    out.C.push_back(c);
  }
  return out;
}

// New eigenspace bases E'_s = E_s U_s.
template <class T>
SecondFormTensor<T> change_bases(const SecondFormTensor<T>& t, const Mat<T>& up, const Mat<T>& um,
                                 const Mat<T>& u0) {
  SecondFormTensor<T> out;
  out.leaf = t.leaf;
  out.grams = {Mat<T>(up.transpose() * t.grams[kPlus] * up), Mat<T>(um.transpose() * t.grams[kMinus] * um),
               Mat<T>(u0.transpose() * t.grams[kZero] * u0)};
  for (int a = 0; a < t.count(); ++a) {
    out.A.push_back(up.transpose() * t.A[a] * um);
    out.B.push_back(up.transpose() * t.B[a] * u0);
    out.C.push_back(um.transpose() * t.C[a] * u0);
  }
  return out;
}

// Residuals of the eight displayed identities; identity 7 (index 6) over i != j, with the
// diagonal i = j companion (A_i A_i^t + B_i B_i^t) B_i + B_i C_i^t C_i = B_i kept separately.
struct OtResiduals {
  std::array<double, 8> identity{};
  double diagonal_companion = 0.0;

  double max() const {
    double m = diagonal_companion;
    for (double r : identity) m = std::max(m, r);
    return m;
  }
};

namespace detail {

// Block tagged with its row and column eigenspaces; products insert the inverse Gram matrix
// of the contracted space.
template <class T>
struct Blk {
  Mat<T> m;
  Space row, col;
  Blk t() const { return {m.transpose(), col, row}; }
};

template <class T>
struct OtContext {
  std::array<Mat<T>, 3> ginv;
  bool plain = true;

  Blk<T> mul(const Blk<T>& a, const Blk<T>& b) const {
    if (a.col != b.row) throw std::logic_error("ot identity: index mismatch");
    if (plain) return {a.m * b.m, a.row, b.col};
    return {a.m * ginv[a.col] * b.m, a.row, b.col};
  }
  template <class... Rest>
  Blk<T> mul(const Blk<T>& a, const Blk<T>& b, const Rest&... rest) const {
    return mul(mul(a, b), rest...);
  }
};

template <class T>
Blk<T> operator+(const Blk<T>& a, const Blk<T>& b) {
  return {a.m + b.m, a.row, a.col};
}
template <class T>
Blk<T> operator-(const Blk<T>& a, const Blk<T>& b) {
  return {a.m - b.m, a.row, a.col};
}
template <class T>
Blk<T> scale(const T& s, const Blk<T>& a) {
  return {s * a.m, a.row, a.col};
}
template <class T>
double sym_part(const Blk<T>& a) {
  return max_abs(Mat<T>(a.m + a.m.transpose()));
}

}  // namespace detail

template <class T>
OtResiduals verify_ot_identities(const SecondFormTensor<T>& t) {
  using detail::Blk;
  detail::OtContext<T> ctx;
  ctx.plain = t.orthonormal();
  if (!ctx.plain)
    for (int s = 0; s < 3; ++s) ctx.ginv[s] = inverse(t.grams[s]);
  const int k = t.count();
  std::vector<Blk<T>> A, B, C;
  for (int a = 0; a < k; ++a) {
    A.push_back({t.A[a], kPlus, kMinus});
    B.push_back({t.B[a], kPlus, kZero});
    C.push_back({t.C[a], kMinus, kZero});
  }
  const Blk<T> gp{t.grams[kPlus], kPlus, kPlus}, gm{t.grams[kMinus], kMinus, kMinus};
  const T two(2);
  OtResiduals r;
  auto upd = [&](int idx, double v) { r.identity[idx] = std::max(r.identity[idx], v); };
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const auto &Ai = A[i], &Aj = A[j], &Bi = B[i], &Bj = B[j], &Ci = C[i], &Cj = C[j];
      Blk<T> m0 = ctx.mul(Ai, Aj.t()) + ctx.mul(Aj, Ai.t()) +
                  scale(two, ctx.mul(Bi, Bj.t()) + ctx.mul(Bj, Bi.t()));
      if (i == j) m0 = m0 - scale(two, gp);
      upd(0, max_abs(m0.m));
      Blk<T> m1 = ctx.mul(Ai.t(), Aj) + ctx.mul(Aj.t(), Ai) +
                  scale(two, ctx.mul(Ci, Cj.t()) + ctx.mul(Cj, Ci.t()));
      if (i == j) m1 = m1 - scale(two, gm);
      upd(1, max_abs(m1.m));
      upd(2, detail::sym_part(ctx.mul(Ai, Cj, Bj.t()) + ctx.mul(Bi, Cj.t(), Aj.t()) +
                              ctx.mul(Aj, Ci, Bj.t())));
      upd(3, detail::sym_part(ctx.mul(Cj, Bj.t(), Ai) + ctx.mul(Aj.t(), Bi, Cj.t()) +
                              ctx.mul(Ci, Bj.t(), Aj)));
      upd(4, detail::sym_part(ctx.mul(Bj.t(), Ai, Cj) + ctx.mul(Cj.t(), Aj.t(), Bi) +
                              ctx.mul(Bj.t(), Aj, Ci)));
      upd(5, max_abs(Mat<T>((ctx.mul(Bj.t(), Bi) + ctx.mul(Bi.t(), Bj) - ctx.mul(Cj.t(), Ci) -
                             ctx.mul(Ci.t(), Cj)).m)));
      if (i != j) {
        Blk<T> m6 = ctx.mul(ctx.mul(Ai, Ai.t()) + ctx.mul(Bi, Bi.t()), Bj) +
                    ctx.mul(Bj, ctx.mul(Bi.t(), Bi) + ctx.mul(Ci.t(), Ci)) + ctx.mul(Bi, Bj.t(), Bi) +
                    ctx.mul(Aj, Ai.t(), Bi) + ctx.mul(Ai, Aj.t(), Bi) + ctx.mul(Bi, Ci.t(), Cj) +
                    ctx.mul(Bi, Cj.t(), Ci);
        upd(6, max_abs(Mat<T>(m6.m - Bj.m)));
      }
    }
    upd(7, detail::sym_part(ctx.mul(C[i].t(), A[i].t(), B[i])));
    Blk<T> d = ctx.mul(ctx.mul(A[i], A[i].t()) + ctx.mul(B[i], B[i].t()), B[i]) +
               ctx.mul(B[i], C[i].t(), C[i]);
    r.diagonal_companion = std::max(r.diagonal_companion, max_abs(Mat<T>(d.m - B[i].m)));
  }
  return r;
}

// p_a(y,y) = y^t S_a y for tangent coordinates y, a = 0..count().
template <class T>
Vec<T> second_form_components(const SecondFormTensor<T>& t, const Vec<T>& y) {
  if (y.size() != t.tangent_dim()) throw std::invalid_argument("tangent coordinates have wrong length");
  Vec<T> p(t.count() + 1);
  for (int a = 0; a <= t.count(); ++a) p(a) = y.dot(t.assemble(a) * y);
  return p;
}

// Coefficients read off the expansion of F(tx + y + w), F = f on M_+ and -f on M_-:
// the t-linear part is 8 sum p_a w_a and the t-free w-linear part is -8 sum q_a w_a.
template <class T>
struct ExpansionPQ {
  Vec<T> p, q;
};

template <class T>
ExpansionPQ<T> expansion_pq(const IsoparametricPolynomial<T>& poly, const FocalFrame<T>& f,
                            const Vec<T>& y) {
  const T sign = f.leaf == Leaf::plus ? T(1) : T(-1);
  Mat<T> h = poly.hessian(y);
  Vec<T> g = poly.grad(y);
  Vec<T> hx = h * f.x;
  ExpansionPQ<T> out{Vec<T>(f.normals.cols()), Vec<T>(f.normals.cols())};
  for (Eigen::Index a = 0; a < f.normals.cols(); ++a) {
    out.p(a) = sign * hx.dot(f.normals.col(a)) / T(8);
    out.q(a) = -sign * g.dot(f.normals.col(a)) / T(8);
  }
  return out;
}

// q_a(X,Y,Z) = -(sign/2) F~(X,Y,Z,n_a) with F~ the symmetric 4-linear form of f.
struct ThirdFormTensor {
  Leaf leaf = Leaf::plus;
  std::vector<MatD> P;
  VecD x;
  MatD normals;
  MatD tangent;
  double clifford_coeff = 2.0;
  double quartic_coeff = -1.0;

  int count() const { return static_cast<int>(normals.cols()); }

  double polar(const VecD& v1, const VecD& v2, const VecD& v3, const VecD& v4) const {
    double s = 0.0;
    for (const auto& p : P) {
      VecD p1 = p * v1;
      s += p1.dot(v2) * (p * v3).dot(v4) + p1.dot(v3) * (p * v2).dot(v4) + p1.dot(v4) * (p * v2).dot(v3);
    }
    double e = v1.dot(v2) * v3.dot(v4) + v1.dot(v3) * v2.dot(v4) + v1.dot(v4) * v2.dot(v3);
    return (clifford_coeff * s + quartic_coeff * e) / 3.0;
  }

  double value(int a, const VecD& X, const VecD& Y, const VecD& Z) const {
    const double sign = leaf == Leaf::plus ? 1.0 : -1.0;
    return -0.5 * sign * polar(X, Y, Z, normals.col(a));
  }

  VecD cubic(const VecD& y) const {
    VecD q(count());
    for (int a = 0; a < count(); ++a) q(a) = value(a, y, y, y);
    return q;
  }
};

// Builds the third form and checks the expansion p against the block p at `checks` random
// tangent vectors; a mismatch beyond tol is an internal inconsistency.
inline ThirdFormTensor third_form_components(const IsoparametricPolynomial<double>& poly,
                                             const FocalFrame<double>& f,
                                             const SecondFormTensor<double>& t, Rng& rng,
                                             int checks = 4, double tol = 1e-10) {
  if (!t.orthonormal()) throw std::invalid_argument("third_form_components: frame not orthonormal");
  ThirdFormTensor q;
  q.leaf = f.leaf;
  q.P = f.P;
  q.x = f.x;
  q.normals = f.normals;
  q.tangent = f.tangent();
  q.clifford_coeff = poly.clifford_coeff;
  q.quartic_coeff = poly.quartic_coeff;
  for (int k = 0; k < checks; ++k) {
    VecD u = rng.unit_vector(q.tangent.cols());
    VecD y = q.tangent * u;
    auto e = expansion_pq(poly, f, y);
    VecD pb = second_form_components(t, u);
    if ((e.p - pb).cwiseAbs().maxCoeff() > tol)
      throw std::runtime_error("third_form_components: expansion and block p disagree");
    if ((e.q - q.cubic(y)).cwiseAbs().maxCoeff() > tol)
      throw std::runtime_error("third_form_components: expansion and polarized q disagree");
  }
  return q;
}

struct ThirdFormResiduals {
  double pq = 0.0;        // |sum_a p_a q_a|
  double norm_identity = 0.0;  // |16 sum q^2 - 16 G |u|^2 + |grad G|^2|, G = sum p_a^2
  double p_paths = 0.0;   // expansion vs block p
};

inline ThirdFormResiduals third_form_identities(const IsoparametricPolynomial<double>& poly,
                                                const FocalFrame<double>& f,
                                                const SecondFormTensor<double>& t,
                                                const ThirdFormTensor& q, int samples, Rng& rng) {
  ThirdFormResiduals r;
  std::vector<MatD> s;
  for (int a = 0; a <= t.count(); ++a) s.push_back(t.assemble(a));
  for (int k = 0; k < samples; ++k) {
    VecD u = rng.unit_vector(q.tangent.cols());
    VecD y = q.tangent * u;
    VecD p = second_form_components(t, u);
    VecD qq = q.cubic(y);
    double g = p.squaredNorm();
    VecD grad = VecD::Zero(u.size());
    for (int a = 0; a <= t.count(); ++a) grad += 4.0 * p(a) * (s[a] * u);
    r.pq = std::max(r.pq, std::abs(p.dot(qq)));
    r.norm_identity = std::max(r.norm_identity, std::abs(16.0 * qq.squaredNorm() - 16.0 * g * u.squaredNorm() +
                                                         grad.squaredNorm()));
    r.p_paths = std::max(r.p_paths, (expansion_pq(poly, f, y).p - p).cwiseAbs().maxCoeff());
  }
  return r;
}

// Max over sampled triples of the deviation of q_a from full symmetry.
inline double third_form_symmetry_residual(const ThirdFormTensor& q, int samples, Rng& rng) {
  double worst = 0.0;
  const auto n = q.tangent.cols();
  for (int k = 0; k < samples; ++k) {
    VecD X = q.tangent * rng.unit_vector(n), Y = q.tangent * rng.unit_vector(n),
         Z = q.tangent * rng.unit_vector(n);
    for (int a = 0; a < q.count(); ++a) {
      double v = q.value(a, X, Y, Z);
      for (double w : {q.value(a, Y, X, Z), q.value(a, Z, Y, X), q.value(a, X, Z, Y), q.value(a, Y, Z, X)})
        worst = std::max(worst, std::abs(v - w));
    }
  }
  return worst;
}

}  // namespace fkm

#endif  // FKM_FORMS_HPP
