#ifndef FKM_CLIFFORD_HPP
#define FKM_CLIFFORD_HPP

#include "fkm/octonion.hpp"

#include <stdexcept>
#include <vector>

namespace fkm {

template <class T>
struct SkewRep {
  int k = 0;
  int dim = 0;
  std::vector<Mat<T>> rho;  // rho[i-1] = rho_i
};

template <class T>
struct CliffordSystem {
  int m = 0;  // P_0..P_m
  int l = 0;  // ambient dimension 2l
  std::vector<Mat<T>> P;

  int count() const { return m + 1; }
  int ambient() const { return 2 * l; }

  // sum_a c_a P_a
  Mat<T> combine(const Vec<T>& c) const {
    Mat<T> out = Mat<T>::Zero(2 * l, 2 * l);
    for (int a = 0; a <= m; ++a) out += c(a) * P[a];
    return out;
  }

  // (<P_a x, x>)_a
  Vec<T> moments(const Vec<T>& x) const {
    Vec<T> u(m + 1);
    for (int a = 0; a <= m; ++a) u(a) = x.dot(P[a] * x);
    return u;
  }
};

// rho_i on O + O; mixed uses left multiplication on the first summand and right on the second.
template <class T>
SkewRep<T> build_skew_rep(Side side) {
  SkewRep<T> rep{7, 16, {}};
  for (int i = 1; i <= 7; ++i) {
    Mat<T> first = mult_matrix<T>(i, side == Side::right ? Side::right : Side::left);
    Mat<T> second = mult_matrix<T>(i, side == Side::left ? Side::left : Side::right);
    Mat<T> r = Mat<T>::Zero(16, 16);
    r.topLeftCorner(8, 8) = first;
    r.bottomRightCorner(8, 8) = second;
    rep.rho.push_back(r);
  }
  return rep;
}

// Max of |rho_i rho_j + rho_j rho_i + 2 delta_ij I| and |rho_i + rho_i^t|.
template <class T>
double skew_rep_residual(const SkewRep<T>& rep) {
  const Mat<T> id = Mat<T>::Identity(rep.dim, rep.dim);
  double worst = 0.0;
  for (int i = 0; i < rep.k; ++i) {
    worst = std::max(worst, max_abs(Mat<T>(rep.rho[i] + rep.rho[i].transpose())));
    for (int j = i; j < rep.k; ++j) {
      Mat<T> m = rep.rho[i] * rep.rho[j] + rep.rho[j] * rep.rho[i];
      if (i == j) m += T(2) * id;
      worst = std::max(worst, max_abs(m));
    }
  }
  return worst;
}

// Max of |P_a P_b + P_b P_a - 2 delta_ab I| and |P_a - P_a^t|.
template <class T>
double clifford_residual(const CliffordSystem<T>& sys) {
  const Mat<T> id = Mat<T>::Identity(sys.ambient(), sys.ambient());
  double worst = 0.0;
  for (int a = 0; a <= sys.m; ++a) {
    worst = std::max(worst, max_abs(Mat<T>(sys.P[a] - sys.P[a].transpose())));
    for (int b = a; b <= sys.m; ++b) {
      Mat<T> x = sys.P[a] * sys.P[b] + sys.P[b] * sys.P[a];
      if (a == b) x -= T(2) * id;
      worst = std::max(worst, max_abs(x));
    }
  }
  return worst;
}

// P_0 = diag(I,-I), P_1 = [[0,I],[I,0]], P_{1+i} = [[0,rho_i],[-rho_i,0]].
template <class T>
CliffordSystem<T> lift_symmetric_system(const SkewRep<T>& rep, double tol = 0.0) {
  if (skew_rep_residual(rep) > tol) throw std::invalid_argument("skew representation invariant violated");
  const int l = rep.dim;
  CliffordSystem<T> sys{rep.k + 1, l, {}};
  const Mat<T> id = Mat<T>::Identity(l, l);
  Mat<T> p0 = Mat<T>::Zero(2 * l, 2 * l), p1 = Mat<T>::Zero(2 * l, 2 * l);
  p0.topLeftCorner(l, l) = id;
  p0.bottomRightCorner(l, l) = -id;
  p1.topRightCorner(l, l) = id;
  p1.bottomLeftCorner(l, l) = id;
  sys.P.push_back(p0);
  sys.P.push_back(p1);
  for (const auto& r : rep.rho) {
    Mat<T> p = Mat<T>::Zero(2 * l, 2 * l);
    p.topRightCorner(l, l) = r;
    p.bottomLeftCorner(l, l) = -r;
    sys.P.push_back(p);
  }
  return sys;
}

template <class T>
CliffordSystem<T> fkm_system(Side side) {
  return lift_symmetric_system(build_skew_rep<T>(side));
}

// rho_i recovered from the upper right block of P_{1+i}.
template <class T>
std::vector<Mat<T>> skew_part(const CliffordSystem<T>& sys) {
  std::vector<Mat<T>> out;
  for (int a = 2; a <= sys.m; ++a) out.push_back(sys.P[a].topRightCorner(sys.l, sys.l));
  return out;
}

// Minimal dimension of an irreducible C_k module, 0 <= k <= 9.
inline int min_module_dim(int k) {
  static constexpr int table[] = {1, 2, 4, 4, 8, 8, 8, 8, 16, 32};
  if (k < 0 || k > 9) throw std::out_of_range("min_module_dim: k out of range");
  return table[k];
}

}  // namespace fkm

#endif  // FKM_CLIFFORD_HPP
