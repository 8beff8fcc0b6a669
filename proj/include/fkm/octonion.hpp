#ifndef FKM_OCTONION_HPP
#define FKM_OCTONION_HPP

#include "fkm/linalg.hpp"
#include "fkm/report.hpp"
#include "fkm/rng.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkm {

// Which octonion multiplication builds the skew representation.
// mixed: left multiplication on the first summand, right on the second.
enum class Side { left, right, mixed };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    default: return "mixed";
  }
}

inline Side parse_side(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  if (s == "mixed") return Side::mixed;
  throw std::invalid_argument("unknown side: " + s);
}

template <class T>
using Quaternion = std::array<T, 4>;
template <class T>
using Octonion = std::array<T, 8>;

// Quaternion product with i*j = k.
template <class T>
Quaternion<T> quat_mul(const Quaternion<T>& a, const Quaternion<T>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

template <class T>
Quaternion<T> quat_conj(const Quaternion<T>& a) {
  return {a[0], -a[1], -a[2], -a[3]};
}

// Cayley-Dickson: (a,b)(c,d) = (ac - conj(d) b, da + b conj(c)), e_4 = (0,1).
template <class T>
Octonion<T> oct_mul(const Octonion<T>& x, const Octonion<T>& y) {
  Quaternion<T> a{x[0], x[1], x[2], x[3]}, b{x[4], x[5], x[6], x[7]};
  Quaternion<T> c{y[0], y[1], y[2], y[3]}, d{y[4], y[5], y[6], y[7]};
  auto ac = quat_mul(a, c), db = quat_mul(quat_conj(d), b);
  auto da = quat_mul(d, a), bc = quat_mul(b, quat_conj(c));
  Octonion<T> out;
  for (int k = 0; k < 4; ++k) {
    out[k] = ac[k] - db[k];
    out[4 + k] = da[k] + bc[k];
  }
  return out;
}

template <class T>
Octonion<T> oct_basis(int a) {
  Octonion<T> e;
  e.fill(T(0));
  e.at(static_cast<std::size_t>(a)) = T(1);
  return e;
}

template <class T>
Octonion<T> to_octonion(const Vec<T>& v) {
  Octonion<T> o;
  for (int i = 0; i < 8; ++i) o[i] = v(i);
  return o;
}

template <class T>
Vec<T> to_vec(const Octonion<T>& o) {
  Vec<T> v(8);
  for (int i = 0; i < 8; ++i) v(i) = o[i];
  return v;
}

// Column j holds e_a e_j (left) or e_j e_a (right).
template <class T>
Mat<T> mult_matrix(int a, Side side) {
  if (a < 0 || a > 7) throw std::out_of_range("mult_matrix: basis index out of range");
  if (side == Side::mixed) throw std::invalid_argument("mult_matrix: side must be left or right");
  Mat<T> m(8, 8);
  auto ea = oct_basis<T>(a);
  for (int j = 0; j < 8; ++j) {
    auto ej = oct_basis<T>(j);
    auto p = side == Side::left ? oct_mul(ea, ej) : oct_mul(ej, ea);
    for (int i = 0; i < 8; ++i) m(i, j) = p[i];
  }
  return m;
}

// Left quaternion multiplication matrices (column j = e_a e_j).
template <class T>
Mat<T> quat_left_matrix(int a) {
  Mat<T> m(4, 4);
  for (int j = 0; j < 4; ++j) {
    Quaternion<T> ea{T(0), T(0), T(0), T(0)}, ej{T(0), T(0), T(0), T(0)};
    ea[a] = T(1);
    ej[j] = T(1);
    auto p = quat_mul(ea, ej);
    for (int i = 0; i < 4; ++i) m(i, j) = p[i];
  }
  return m;
}

// Bilinear map F: R^r x R^s -> R^n. F[a] is s-by-n and its row alpha is F(e_a, f_alpha),
// so |F(x,y)| = |x||y| is equivalent to F_a F_b^t + F_b F_a^t = 2 delta_ab I_s.
template <class T>
struct OrthogonalMultiplication {
  int r = 0, s = 0, n = 0;
  std::vector<Mat<T>> F;

  Vec<T> apply(const Vec<T>& x, const Vec<T>& y) const {
    Vec<T> out = Vec<T>::Zero(n);
    for (int a = 0; a < r; ++a) out += x(a) * (F[a].transpose() * y);
    return out;
  }
};

struct MultiplicationVerdict {
  double hurwitz_residual = 0.0;
  double composition_residual = 0.0;
  bool hurwitz_pass = false;
  bool composition_pass = false;
  bool pass() const { return hurwitz_pass && composition_pass; }
  bool agree() const { return hurwitz_pass == composition_pass; }
};

template <class T>
double hurwitz_residual(const OrthogonalMultiplication<T>& om) {
  double worst = 0.0;
  const Mat<T> id = Mat<T>::Identity(om.s, om.s);
  for (int a = 0; a < om.r; ++a)
    for (int b = a; b < om.r; ++b) {
      Mat<T> m = om.F[a] * om.F[b].transpose() + om.F[b] * om.F[a].transpose();
      if (a == b) m -= T(2) * id;
      worst = std::max(worst, max_abs(m));
    }
  return worst;
}

// Hurwitz residual and sampled norm-composition residual (unit-scaled in float mode).
template <class T>
MultiplicationVerdict verify_orthogonal_multiplication(const OrthogonalMultiplication<T>& om,
                                                       int samples, Rng& rng,
                                                       double tol = kDefaultTol) {
  if (static_cast<int>(om.F.size()) != om.r) throw std::invalid_argument("dimension mismatch");
  for (const auto& f : om.F)
    if (f.rows() != om.s || f.cols() != om.n) throw std::invalid_argument("dimension mismatch");
  MultiplicationVerdict v;
  v.hurwitz_residual = hurwitz_residual(om);
  for (int k = 0; k < samples; ++k) {
    Vec<T> x = rng.vector<T>(om.r), y = rng.vector<T>(om.s);
    if constexpr (!is_exact_v<T>) {
      x /= x.norm();
      y /= y.norm();
    }
    Vec<T> z = om.apply(x, y);
    T d = z.squaredNorm() - x.squaredNorm() * y.squaredNorm();
    v.composition_residual = std::max(v.composition_residual, magnitude(d));
  }
  if constexpr (is_exact_v<T>) {
    v.hurwitz_pass = v.hurwitz_residual == 0.0;
    v.composition_pass = v.composition_residual == 0.0;
  } else {
    v.hurwitz_pass = v.hurwitz_residual <= tol;
    v.composition_pass = v.composition_residual <= tol;
  }
  return v;
}

template <class T>
OrthogonalMultiplication<T> quaternion_multiplication() {
  OrthogonalMultiplication<T> om{4, 4, 4, {}};
  for (int a = 0; a < 4; ++a) om.F.push_back(quat_left_matrix<T>(a).transpose());
  return om;
}

template <class T>
OrthogonalMultiplication<T> octonion_multiplication(Side side) {
  OrthogonalMultiplication<T> om{8, 8, 8, {}};
  for (int a = 0; a < 8; ++a) om.F.push_back(mult_matrix<T>(a, side).transpose());
  return om;
}

}  // namespace fkm

#endif  // FKM_OCTONION_HPP
