#ifndef FKM_FOCAL_HPP
#define FKM_FOCAL_HPP

#include "fkm/polynomial.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fkm {

enum class Leaf { minus, plus };

// max of | |zeta|^2 - 1/2 |, | |eta|^2 - 1/2 |, |<zeta,eta>|, |<rho_i zeta, eta>|.
template <class T>
double clifford_stiefel_residual(const CliffordSystem<T>& sys, const Vec<T>& x) {
  if (x.size() != sys.ambient()) throw std::invalid_argument("point has wrong dimension");
  const int l = sys.l;
  Vec<T> zeta = x.head(l), eta = x.tail(l);
  const T half = T(1) / T(2);
  double worst = std::max(magnitude(T(zeta.squaredNorm() - half)), magnitude(T(eta.squaredNorm() - half)));
  worst = std::max(worst, magnitude(T(zeta.dot(eta))));
  for (const auto& r : skew_part(sys)) worst = std::max(worst, magnitude(T((r * zeta).dot(eta))));
  return worst;
}

template <class T>
bool on_clifford_stiefel(const CliffordSystem<T>& sys, const Vec<T>& x, double tol = 1e-12) {
  double r = clifford_stiefel_residual(sys, x);
  return is_exact_v<T> ? r == 0.0 : r <= tol;
}

// Random zeta with |zeta| = 1/sqrt(2), then eta in the complement of span{zeta, rho_i zeta}.
inline VecD sample_clifford_stiefel(const CliffordSystem<double>& sys, Rng& rng) {
  const int l = sys.l;
  auto rho = skew_part(sys);
  for (int attempt = 0; attempt < 100; ++attempt) {
    VecD zeta = rng.gaussian(l);
    zeta /= zeta.norm() * std::sqrt(2.0);
    MatD span(1 + rho.size(), l);
    span.row(0) = zeta.transpose();
    for (std::size_t i = 0; i < rho.size(); ++i) span.row(1 + i) = (rho[i] * zeta).transpose();
    Eigen::JacobiSVD<MatD> svd(span);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) < 1e-6 * s(0)) continue;
    MatD comp = kernel_basis(span);
    if (comp.cols() != l - span.rows()) continue;
    VecD eta = comp * rng.gaussian(comp.cols());
    if (eta.norm() < 1e-6) continue;
    eta /= eta.norm() * std::sqrt(2.0);
    VecD x(2 * l);
    x << zeta, eta;
    return x;
  }
  throw std::runtime_error("sample_clifford_stiefel: degenerate draws");
}

// Reflection I - 2 v v^t / v^t v.
template <class T>
Mat<T> householder(const Vec<T>& v) {
  const auto n = v.size();
  T vv = v.squaredNorm();
  if (vv == T(0)) return Mat<T>::Identity(n, n);
  return Mat<T>(Mat<T>::Identity(n, n) - (T(2) / vv) * v * v.transpose());
}

// Rational unit vector by inverse stereographic projection of a random rational point.
inline VecQ rational_unit_vector(Eigen::Index n, Rng& rng) {
  VecQ t = rng.rational_vector(n - 1, 5, 4);
  Rational s = t.squaredNorm();
  VecQ w(n);
  w.head(n - 1) = (Rational(2) / (s + 1)) * t;
  w(n - 1) = (s - 1) / (s + 1);
  return w;
}

// Exact point of M_-: zeta = H1 H2 (e_i + e_j)/2, eta = (u, v) with v = H zeta_1 and u solved exactly.
inline VecQ sample_clifford_stiefel_exact(const CliffordSystem<Rational>& sys, Rng& rng) {
  const int l = sys.l, h = l / 2;
  auto rho = skew_part(sys);
  for (int attempt = 0; attempt < 100; ++attempt) {
    long i = rng.uniform_int(0, l - 1), j = rng.uniform_int(0, l - 2);
    if (j >= i) ++j;
    VecQ zeta = VecQ::Zero(l);
    zeta(i) = Rational(1, 2);
    zeta(j) = Rational(1, 2);
    zeta = householder<Rational>(rng.rational_vector(l, 3, 2)) * zeta;
    zeta = householder<Rational>(rng.rational_vector(l, 3, 2)) * zeta;
    VecQ z1 = zeta.head(h);
    if (z1.squaredNorm() == 0) continue;
    VecQ v = householder<Rational>(rng.rational_vector(h, 3, 2)) * z1;
    MatQ span(1 + rho.size(), l);
    span.row(0) = zeta.transpose();
    for (std::size_t k = 0; k < rho.size(); ++k) span.row(1 + k) = (rho[k] * zeta).transpose();
    MatQ m1 = span.leftCols(h), m2 = span.rightCols(h);
    if (rank(m1) != h) continue;
    MatQ u = solve_exact(m1, MatQ(-m2 * v));
    VecQ x(2 * l);
    x << zeta, u.col(0), v;
    if (clifford_stiefel_residual(sys, x) == 0.0) return x;
  }
  throw std::runtime_error("sample_clifford_stiefel_exact: degenerate draws");
}

// Shape form of M_- at x in direction n: -sum_a <n, P_a x> P_a.
template <class T>
Mat<T> minus_ambient_form(const std::vector<Mat<T>>& P, const Vec<T>& x, const Vec<T>& n) {
  const auto d = x.size();
  Mat<T> k = Mat<T>::Zero(d, d);
  for (const auto& p : P) k -= T(n.dot(p * x)) * p;
  return k;
}

// Shape form of M_+ at x in direction n: sum_a (P_a x)(P_a n)^t + transpose.
template <class T>
Mat<T> plus_ambient_form(const std::vector<Mat<T>>& P, const Vec<T>& x, const Vec<T>& n) {
  const auto d = x.size();
  Mat<T> k = Mat<T>::Zero(d, d);
  for (const auto& p : P) {
    Vec<T> px = p * x, pn = p * n;
    k += px * pn.transpose() + pn * px.transpose();
  }
  return k;
}

// Frame at a focal point: distinguished normal normals.col(0) and the eigenspaces of its
// shape operator. Bases are orthonormal in float mode and echelon (with Gram matrices) in
// exact mode.
template <class T>
struct FocalFrame {
  Leaf leaf = Leaf::minus;
  std::vector<Mat<T>> P;
  Vec<T> x;
  Mat<T> normals;
  Mat<T> Ep, Em, E0;

  // Ambient matrix K with S_n(X,Y) = X^t K Y.
  Mat<T> ambient_form(const Vec<T>& n) const {
    return leaf == Leaf::minus ? minus_ambient_form(P, x, n) : plus_ambient_form(P, x, n);
  }

  Mat<T> form(const Vec<T>& n, const Mat<T>& X, const Mat<T>& Y) const {
    return X.transpose() * ambient_form(n) * Y;
  }

  Mat<T> tangent() const { return hstack<T>({Ep, Em, E0}); }
  Eigen::Index tangent_dim() const { return Ep.cols() + Em.cols() + E0.cols(); }
  Vec<T> normal(const Vec<T>& c) const { return normals * c; }
};

template <class T>
double frame_gram_residual(const FocalFrame<T>& f) {
  Mat<T> all = hstack<T>({Mat<T>(f.x), f.normals, f.tangent()});
  Mat<T> g = all.transpose() * all;
  return max_abs(Mat<T>(g - Mat<T>::Identity(g.rows(), g.cols())));
}

// Frame of M_- at x for the normal P_w x: P'_b = sum_a H_ab P_a with H e_0 = w.
template <class T>
FocalFrame<T> focal_frame_at(const CliffordSystem<T>& sys, const Vec<T>& x, const Vec<T>& w,
                             double tol = 1e-10) {
  if (!on_clifford_stiefel(sys, x, tol)) throw std::invalid_argument("point is not on M_-");
  const int k = sys.count();
  if (w.size() != k) throw std::invalid_argument("normal coefficients have wrong length");
  if (!is_zero(T(w.squaredNorm() - T(1)), 1e-12)) throw std::invalid_argument("normal is not unit");
  Vec<T> v = Vec<T>::Unit(k, 0) - w;
  Mat<T> hmat = householder<T>(v);
  std::vector<Mat<T>> pr;
  for (int b = 0; b < k; ++b) pr.push_back(sys.combine(hmat.col(b)));

  FocalFrame<T> f;
  f.leaf = Leaf::minus;
  f.P = sys.P;
  f.x = x;
  const auto d = x.size();
  f.normals = Mat<T>(d, k);
  for (int b = 0; b < k; ++b) f.normals.col(b) = pr[b] * x;
  f.E0 = Mat<T>(d, k - 1);
  for (int b = 1; b < k; ++b) f.E0.col(b - 1) = pr[b] * (pr[0] * x);
  Mat<T> id = Mat<T>::Identity(d, d);
  Mat<T> perp = hstack<T>({Mat<T>(x), f.normals}).transpose();
  f.Ep = kernel_basis(vstack<T>({Mat<T>(pr[0] + id), perp}), tol);
  f.Em = kernel_basis(vstack<T>({Mat<T>(pr[0] - id), perp}), tol);
  if (f.Ep.cols() != 7 || f.Em.cols() != 7 || f.E0.cols() != 8)
    throw std::runtime_error("focal_frame_at: unexpected eigenspace dimensions");
  return f;
}

template <class T>
FocalFrame<T> focal_frame_at(const CliffordSystem<T>& sys, const Vec<T>& x) {
  return focal_frame_at(sys, x, Vec<T>(Vec<T>::Unit(sys.count(), 0)));
}

// Gram matrix of the tangent basis.
template <class T>
Mat<T> tangent_gram(const FocalFrame<T>& f) {
  Mat<T> t = f.tangent();
  return t.transpose() * t;
}

// Shape operator in tangent coordinates (G^{-1} times the form), no unit check.
template <class T>
Mat<T> shape_operator_raw(const FocalFrame<T>& f, const Vec<T>& c) {
  Mat<T> t = f.tangent();
  Mat<T> form = t.transpose() * f.ambient_form(f.normal(c)) * t;
  if constexpr (is_exact_v<T>)
    return inverse(Mat<T>(t.transpose() * t)) * form;
  else
    return form;
}

template <class T>
Mat<T> shape_operator(const FocalFrame<T>& f, const Vec<T>& c) {
  if (c.size() != f.normals.cols()) throw std::invalid_argument("normal coefficients have wrong length");
  if (!is_zero(T(c.squaredNorm() - T(1)), 1e-12)) throw std::invalid_argument("normal is not unit");
  return shape_operator_raw(f, c);
}

// Ambient version: Pi K Pi with Pi the orthogonal projector onto the tangent space.
template <class T>
Mat<T> ambient_shape_operator(const FocalFrame<T>& f, const Vec<T>& c) {
  Mat<T> t = f.tangent();
  Mat<T> pi = t * inverse(Mat<T>(t.transpose() * t)) * t.transpose();
  return pi * f.ambient_form(f.normal(c)) * pi;
}

// Frame of M_+ at x with distinguished normal n0 (float only).
inline FocalFrame<double> plus_frame_at(const CliffordSystem<double>& sys, const VecD& x,
                                        const VecD& n0, double tol = 1e-8) {
  const auto d = x.size();
  VecD u = sys.moments(x);
  if (std::abs(u.norm() - 1.0) > tol || std::abs(x.norm() - 1.0) > tol)
    throw std::invalid_argument("point is not on M_+");
  MatD pu = sys.combine(u);
  MatD wperp = kernel_basis(MatD(u.transpose()));
  MatD cl(d, wperp.cols());
  for (Eigen::Index k = 0; k < wperp.cols(); ++k) cl.col(k) = sys.combine(wperp.col(k)) * x;
  MatD nspace = kernel_basis(vstack<double>({MatD(pu + MatD::Identity(d, d)), MatD(cl.transpose())}));
  if (nspace.cols() != 8) throw std::runtime_error("plus_frame_at: normal space has wrong dimension");
  if ((nspace * (nspace.transpose() * n0) - n0).norm() > tol || std::abs(n0.norm() - 1.0) > tol)
    throw std::invalid_argument("plus_frame_at: n0 is not a unit normal");
  MatD rest = orthonormal_span(MatD(nspace - n0 * (n0.transpose() * nspace)));

  FocalFrame<double> f;
  f.leaf = Leaf::plus;
  f.P = sys.P;
  f.x = x;
  f.normals = hstack<double>({MatD(n0), rest});
  MatD t = kernel_basis(MatD(hstack<double>({MatD(x), f.normals}).transpose()));
  auto es = eigen_symmetric(f.form(n0, t, t));
  std::vector<Eigen::Index> ip, im, iz;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    double ev = es.values(k);
    (ev > 0.5 ? ip : ev < -0.5 ? im : iz).push_back(k);
  }
  auto pick = [&](const std::vector<Eigen::Index>& idx) {
    MatD out(d, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = t * es.vectors.col(idx[k]);
    return out;
  };
  f.Ep = pick(ip);
  f.Em = pick(im);
  f.E0 = pick(iz);
  if (f.Ep.cols() != 8 || f.Em.cols() != 8 || f.E0.cols() != 7)
    throw std::runtime_error("plus_frame_at: unexpected eigenspace dimensions");
  return f;
}

// Mirror point (x, n) = ((x* + n*)/sqrt2, (x* - n*)/sqrt2) of the M_- frame's distinguished normal.
inline std::pair<VecD, VecD> mirror_point(const FocalFrame<double>& minus) {
  const double r = std::sqrt(0.5);
  VecD ns = minus.normals.col(0);
  return {r * (minus.x + ns), r * (minus.x - ns)};
}

inline FocalFrame<double> plus_frame_from_minus(const CliffordSystem<double>& sys,
                                                const FocalFrame<double>& minus) {
  auto [x, n] = mirror_point(minus);
  return plus_frame_at(sys, x, n);
}

// Random M_+ frame: sample M_-, pick a random unit normal, mirror.
inline FocalFrame<double> random_plus_frame(const CliffordSystem<double>& sys, Rng& rng) {
  VecD xs = sample_clifford_stiefel(sys, rng);
  auto minus = focal_frame_at(sys, xs, VecD(rng.unit_vector(sys.count())));
  return plus_frame_from_minus(sys, minus);
}

}  // namespace fkm

#endif  // FKM_FOCAL_HPP
