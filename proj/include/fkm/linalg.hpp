#ifndef FKM_LINALG_HPP
#define FKM_LINALG_HPP

#include "fkm/scalar.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fkm {

// Reduced row echelon form over Q.
struct Echelon {
  MatQ R;
  std::vector<Eigen::Index> pivots;
};

inline Echelon rref(MatQ m) {
  Echelon out;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = row; i < m.rows(); ++i)
      if (m(i, col) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != row) m.row(piv).swap(m.row(row));
    Rational inv = 1 / m(row, col);
    for (Eigen::Index j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rational f = m(i, col);
      for (Eigen::Index j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.R = std::move(m);
  return out;
}

namespace detail {

template <class T>
Eigen::JacobiSVD<Mat<T>> svd_full(const Mat<T>& m) {
  return Eigen::JacobiSVD<Mat<T>>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

template <class Sv>
Eigen::Index count_above(const Sv& s, double tol) {
  if (s.size() == 0 || !(s(0) > 0)) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

}  // namespace detail

// Exact rank over Q; tol is ignored.
inline Eigen::Index rank(const MatQ& m, double /*tol*/ = 0.0) {
  return static_cast<Eigen::Index>(rref(m).pivots.size());
}

// Float rank: singular values above tol * sigma_max.
template <class T>
  requires(!is_exact_v<T>)
Eigen::Index rank(const Mat<T>& m, double tol = kDefaultTol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat<T>> svd(m);
  return detail::count_above(svd.singularValues(), tol);
}

// Echelon kernel basis over Q, one column per free variable.
inline MatQ kernel_basis(const MatQ& m, double /*tol*/ = 0.0) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return MatQ::Identity(n, n);
  Echelon e = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < n; ++j)
    if (!is_pivot[j]) free.push_back(j);
  MatQ out = MatQ::Zero(n, static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) {
    out(free[k], k) = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) out(e.pivots[r], k) = -e.R(r, free[k]);
  }
  return out;
}

// Orthonormal kernel basis from the right singular vectors.
template <class T>
  requires(!is_exact_v<T>)
Mat<T> kernel_basis(const Mat<T>& m, double tol = kDefaultTol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0 || n == 0) return Mat<T>::Identity(n, n);
  auto svd = detail::svd_full(m);
  Eigen::Index r = detail::count_above(svd.singularValues(), tol);
  return svd.matrixV().rightCols(n - r);
}

template <class T>
Mat<T> vstack(const std::vector<Mat<T>>& ms) {
  Eigen::Index rows = 0;
  for (const auto& m : ms) rows += m.rows();
  Mat<T> out(rows, ms.empty() ? 0 : ms.front().cols());
  Eigen::Index r = 0;
  for (const auto& m : ms) {
    if (m.cols() != out.cols()) throw std::invalid_argument("vstack: column count mismatch");
    out.middleRows(r, m.rows()) = m;
    r += m.rows();
  }
  return out;
}

template <class T>
Mat<T> hstack(const std::vector<Mat<T>>& ms) {
  Eigen::Index cols = 0;
  for (const auto& m : ms) cols += m.cols();
  Mat<T> out(ms.empty() ? 0 : ms.front().rows(), cols);
  Eigen::Index c = 0;
  for (const auto& m : ms) {
    if (m.rows() != out.rows()) throw std::invalid_argument("hstack: row count mismatch");
    out.middleCols(c, m.cols()) = m;
    c += m.cols();
  }
  return out;
}

// Basis of the common kernel of all matrices.
template <class T>
Mat<T> joint_kernel(const std::vector<Mat<T>>& ms, double tol = kDefaultTol) {
  if (ms.empty()) throw std::invalid_argument("no matrices");
  return kernel_basis(vstack(ms), tol);
}

// Orthonormal basis of the column span (float only).
inline MatD orthonormal_span(const MatD& cols, double tol = kDefaultTol) {
  if (cols.cols() == 0) return cols;
  Eigen::JacobiSVD<MatD> svd(cols, Eigen::ComputeThinU);
  Eigen::Index r = detail::count_above(svd.singularValues(), tol);
  return svd.matrixU().leftCols(r);
}

// Solve a*x = b exactly; throws when inconsistent, returns one solution otherwise.
inline MatQ solve_exact(const MatQ& a, const MatQ& b) {
  MatQ aug(a.rows(), a.cols() + b.cols());
  aug << a, b;
  Echelon e = rref(aug);
  MatQ x = MatQ::Zero(a.cols(), b.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] >= a.cols()) throw std::runtime_error("solve_exact: inconsistent system");
    x.row(e.pivots[r]) = e.R.row(static_cast<Eigen::Index>(r)).tail(b.cols());
  }
  return x;
}

inline MatQ inverse_exact(const MatQ& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse_exact: not square");
  if (rank(a) != a.rows()) throw std::runtime_error("inverse_exact: singular matrix");
  return solve_exact(a, MatQ::Identity(a.rows(), a.rows()));
}

template <class T>
Mat<T> inverse(const Mat<T>& a) {
  if constexpr (is_exact_v<T>)
    return inverse_exact(a);
  else
    return a.inverse();
}

struct SymmetricEigen {
  VecD values;   // descending
  MatD vectors;  // orthonormal columns
};

inline SymmetricEigen eigen_symmetric(const MatD& m, double sym_tol = 1e-10) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigen_symmetric: not square");
  if (max_abs(m - m.transpose()) > sym_tol * std::max(1.0, max_abs(m)))
    throw std::invalid_argument("eigen_symmetric: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<MatD> es(m);
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](auto a, auto b) { return es.eigenvalues()(a) > es.eigenvalues()(b); });
  SymmetricEigen out{VecD(n), MatD(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(idx[k]);
    out.vectors.col(k) = es.eigenvectors().col(idx[k]);
  }
  return out;
}

// Eigenspaces of an operator with m^3 = m, as kernels of m - I, m + I, m.
template <class T>
struct CubeEigenspaces {
  Mat<T> plus, minus, zero;
};

template <class T>
CubeEigenspaces<T> cube_eigenspaces(const Mat<T>& m, double tol = kDefaultTol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("cube_eigenspaces: not square");
  Mat<T> cube = m * m * m;
  Mat<T> diff = cube - m;
  const bool ok = is_exact_v<T> ? max_abs(diff) == 0.0 : max_abs(diff) <= tol;
  if (!ok) throw std::invalid_argument("cube_eigenspaces: m^3 != m");
  const auto n = m.rows();
  Mat<T> id = Mat<T>::Identity(n, n);
  return {kernel_basis(Mat<T>(m - id), tol), kernel_basis(Mat<T>(m + id), tol),
          kernel_basis(m, tol)};
}

// Multiplicities (+1, -1, 0) of an operator with m^3 = m.
template <class T>
std::array<Eigen::Index, 3> cube_multiplicities(const Mat<T>& m, double tol = kDefaultTol) {
  auto e = cube_eigenspaces(m, tol);
  return {e.plus.cols(), e.minus.cols(), e.zero.cols()};
}

}  // namespace fkm

#endif  // FKM_LINALG_HPP
