#ifndef FKM_POLYNOMIAL_HPP
#define FKM_POLYNOMIAL_HPP

#include "fkm/clifford.hpp"

namespace fkm {

// f(x) = b * sum_a <P_a x, x>^2 + c * |x|^4. The defaults (b, c) = (2, -1) give
// f = -F_FKM, so the Clifford-Stiefel manifold is f^{-1}(-1) = M_-.
template <class T>
struct IsoparametricPolynomial {
  CliffordSystem<T> system;
  int g = 4;
  int m_plus = 7;
  int m_minus = 8;
  T clifford_coeff = T(2);
  T quartic_coeff = T(-1);

  int dim() const { return system.ambient(); }

  T eval(const Vec<T>& x) const {
    Vec<T> u = system.moments(x);
    T r2 = x.squaredNorm();
    return clifford_coeff * u.squaredNorm() + quartic_coeff * r2 * r2;
  }

  T fkm_value(const Vec<T>& x) const { return -eval(x); }

  Vec<T> grad(const Vec<T>& x) const {
    Vec<T> u = system.moments(x);
    Vec<T> out = T(4) * quartic_coeff * x.squaredNorm() * x;
    for (int a = 0; a <= system.m; ++a) out += T(4) * clifford_coeff * u(a) * (system.P[a] * x);
    return out;
  }

  Mat<T> hessian(const Vec<T>& x) const {
    const int n = dim();
    Vec<T> u = system.moments(x);
    Mat<T> h = quartic_coeff * (T(4) * x.squaredNorm() * Mat<T>::Identity(n, n) +
                                T(8) * x * x.transpose());
    for (int a = 0; a <= system.m; ++a) {
      Vec<T> px = system.P[a] * x;
      h += clifford_coeff * (T(4) * u(a) * system.P[a] + T(8) * px * px.transpose());
    }
    return h;
  }

  T laplacian(const Vec<T>& x) const {
    const int n = dim();
    Vec<T> u = system.moments(x);
    T out = quartic_coeff * T(4 * (n + 2)) * x.squaredNorm();
    for (int a = 0; a <= system.m; ++a)
      out += clifford_coeff * (T(8) * (system.P[a] * x).squaredNorm() + T(4) * u(a) * system.P[a].trace());
    return out;
  }
};

template <class T>
IsoparametricPolynomial<T> fkm_polynomial(Side side) {
  IsoparametricPolynomial<T> p;
  p.system = fkm_system<T>(side);
  return p;
}

struct CartanMunznerResidual {
  double gradient = 0.0;
  double laplacian = 0.0;
  double max() const { return std::max(gradient, laplacian); }
};

// |grad f|^2 - g^2 |x|^{2g-2} and lap f - (m_- - m_+) g^2 |x|^{g-2} / 2, for g = 4.
template <class T>
CartanMunznerResidual cartan_munzner_residual(const IsoparametricPolynomial<T>& p, const Vec<T>& x) {
  T r2 = x.squaredNorm();
  T g2 = T(p.g * p.g);
  T d1 = p.grad(x).squaredNorm() - g2 * r2 * r2 * r2;
  T d2 = p.laplacian(x) - T(p.m_minus - p.m_plus) * g2 * r2 / T(2);
  return {magnitude(d1), magnitude(d2)};
}

// Max residuals over random points: unit Gaussian directions (float) or rational points (exact).
template <class T>
CartanMunznerResidual verify_cartan_munzner(const IsoparametricPolynomial<T>& p, int samples,
                                            Rng& rng) {
  CartanMunznerResidual worst;
  for (int k = 0; k < samples; ++k) {
    Vec<T> x = rng.vector<T>(p.dim());
    if constexpr (!is_exact_v<T>) x /= x.norm();
    auto r = cartan_munzner_residual(p, x);
    worst.gradient = std::max(worst.gradient, r.gradient);
    worst.laplacian = std::max(worst.laplacian, r.laplacian);
  }
  return worst;
}

}  // namespace fkm

#endif  // FKM_POLYNOMIAL_HPP
