#ifndef FKM_PENCIL_HPP
#define FKM_PENCIL_HPP

#include "fkm/forms.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fkm {

// b(x) = sum_i x_i b_i over equally sized generators.
struct BlockPencil {
  std::vector<MatD> gens;

  explicit BlockPencil(std::vector<MatD> g) : gens(std::move(g)) {
    if (gens.empty()) throw std::invalid_argument("BlockPencil: no generators");
    for (const auto& m : gens)
      if (m.rows() != gens[0].rows() || m.cols() != gens[0].cols())
        throw std::invalid_argument("BlockPencil: generators not conformable");
  }

  MatD eval(const VecD& x) const {
    MatD out = MatD::Zero(gens[0].rows(), gens[0].cols());
    for (std::size_t i = 0; i < gens.size(); ++i) out += x(static_cast<Eigen::Index>(i)) * gens[i];
    return out;
  }
  Eigen::Index size() const { return static_cast<Eigen::Index>(gens.size()); }
};

// Max rank over random coefficient draws; equals the generic rank with probability one.
inline Eigen::Index generic_rank(const BlockPencil& p, int trials, Rng& rng, double tol = kDefaultTol) {
  if (trials < 1) throw std::invalid_argument("generic_rank: trials must be positive");
  Eigen::Index best = 0;
  for (int t = 0; t < trials; ++t) best = std::max(best, rank(MatD(p.eval(rng.gaussian(p.size()))), tol));
  return best;
}

// A unit v with b_i v = 0 for all i, if the joint kernel is nontrivial.
inline std::optional<VecD> common_column_relation(const BlockPencil& p, double tol = kDefaultTol) {
  MatD k = joint_kernel(p.gens, tol);
  if (k.cols() == 0) return std::nullopt;
  return VecD(k.col(0));
}

// Each row of d(x) lies in span{(-x3,-x4,x1,x2), (-x4,x3,-x2,x1)}; returns the max fit residual
// over `points` random x.
inline double d_pencil_row_residual(const BlockPencil& d, int points, Rng& rng) {
  if (d.size() != 4 || d.gens[0].cols() != 4) throw std::invalid_argument("d pencil must be 4 generators of width 4");
  std::vector<VecD> xs;
  for (int k = 0; k < points; ++k) xs.push_back(rng.gaussian(4));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d.gens[0].rows(); ++i) {
    MatD lhs(4 * points, 2);
    VecD rhs(4 * points);
    for (int k = 0; k < points; ++k) {
      const VecD& x = xs[k];
      lhs.block(4 * k, 0, 4, 1) << -x(2), -x(3), x(0), x(1);
      lhs.block(4 * k, 1, 4, 1) << -x(3), x(2), -x(1), x(0);
      rhs.segment(4 * k, 4) = d.eval(x).row(i).transpose();
    }
    VecD coef = lhs.colPivHouseholderQr().solve(rhs);
    worst = std::max(worst, (lhs * coef - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline bool d_pencil_row_structure(const BlockPencil& d, Rng& rng, double tol = 1e-10, int points = 20) {
  return d_pencil_row_residual(d, points, rng) <= tol;
}

// max |d(x) b(x)| over random x.
inline double pencil_product_residual(const BlockPencil& d, const BlockPencil& b, int points, Rng& rng) {
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    VecD x = rng.gaussian(d.size());
    worst = std::max(worst, max_abs(MatD(d.eval(x) * b.eval(x))));
  }
  return worst;
}

// Dimensions of the common kernels of {B_a}, {B_a^t}, {C_a}, {C_a^t}.
struct JointKernelDims {
  Eigen::Index b = 0, bt = 0, c = 0, ct = 0;
};

inline JointKernelDims joint_kernel_dims(const SecondFormTensor<double>& t, double tol = kDefaultTol) {
  std::vector<MatD> b, bt, c, ct;
  for (int a = 0; a < t.count(); ++a) {
    b.push_back(t.B[a]);
    bt.push_back(t.B[a].transpose());
    c.push_back(t.C[a]);
    ct.push_back(t.C[a].transpose());
  }
  return {joint_kernel(b, tol).cols(), joint_kernel(bt, tol).cols(), joint_kernel(c, tol).cols(),
          joint_kernel(ct, tol).cols()};
}

// ---------------------------------------------------------------------------------------------
// Kernel dimension of S = R_0 + sum_k c_k R_k with R_0 = diag(I, 0), R_k = [[0, theta_k], [theta_k^t, tau_k]].

struct AppendixPencil {
  int kind = 1;
  int nx = 8, nz = 7;
  std::vector<MatC> theta;  // nx x nz
  std::vector<MatC> tau;    // nz x nz symmetric, zero for kind 1

  Eigen::Index dim() const { return nx + nz; }

  MatC eval(const VecC& c) const {
    MatC s = MatC::Zero(dim(), dim());
    s.topLeftCorner(nx, nx) = c(0) * MatC::Identity(nx, nx);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      Complex ck = c(static_cast<Eigen::Index>(k) + 1);
      s.topRightCorner(nx, nz) += ck * theta[k];
      s.bottomLeftCorner(nz, nx) += ck * theta[k].transpose();
      s.bottomRightCorner(nz, nz) += ck * tau[k];
    }
    return s;
  }

  // Columns of theta entering the independence hypothesis: all for kind 1, the first 6
  // (kind 2) or 5 (kind 3) otherwise.
  Eigen::Index independence_cols() const { return kind == 1 ? nz : kind == 2 ? 6 : 5; }

  bool independent(double tol = kDefaultTol) const {
    MatC m(nx * independence_cols(), static_cast<Eigen::Index>(theta.size()));
    for (std::size_t k = 0; k < theta.size(); ++k) {
      MatC part = theta[k].leftCols(independence_cols());
      m.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const VecC>(part.data(), part.size());
    }
    return rank(m, tol) == static_cast<Eigen::Index>(theta.size());
  }
};

// Case 1: C^8 + C^7, k = 3; case 2: C^7 + C^7 with z_7 terms, k = 2;
// case 3: C^6 + C^7 with z_6 and z_7 terms, k = 2. Real Gaussian theta, resampled until independent.
inline AppendixPencil appendix_pencil(int kind, Rng& rng) {
  if (kind < 1 || kind > 3) throw std::invalid_argument("appendix case must be 1, 2 or 3");
  AppendixPencil p;
  p.kind = kind;
  p.nx = kind == 1 ? 8 : kind == 2 ? 7 : 6;
  p.nz = 7;
  const int k = kind == 1 ? 3 : 2;
  for (int attempt = 0; attempt < 100; ++attempt) {
    p.theta.clear();
    p.tau.clear();
    for (int i = 0; i < k; ++i) {
      p.theta.push_back(rng.gaussian(p.nx, p.nz).cast<Complex>());
      MatC t = MatC::Zero(p.nz, p.nz);
      const int special = kind == 1 ? 0 : kind == 2 ? 1 : 2;
      for (int s = 0; s < special; ++s) {
        const Eigen::Index idx = p.nz - 1 - s;
        VecC row = rng.gaussian(p.nz).cast<Complex>();
        t.row(idx) += row.transpose();
        t.col(idx) += row;
        t(idx, idx) -= row(idx);
      }
      p.tau.push_back(t);
    }
    if (p.independent()) return p;
  }
  throw std::runtime_error("appendix_pencil: could not draw independent theta");
}

struct KernelDimRange {
  Eigen::Index max = 0;
  Eigen::Index min = std::numeric_limits<Eigen::Index>::max();
};

// Kernel dimensions of S over random complex c with c_0 = 1.
inline KernelDimRange appendix_kernel_sampler(const AppendixPencil& p, int trials, Rng& rng,
                                              double tol = kDefaultTol) {
  KernelDimRange r;
  const auto k = static_cast<Eigen::Index>(p.theta.size());
  for (int t = 0; t < trials; ++t) {
    VecC c(k + 1);
    c(0) = 1.0;
    c.tail(k) = rng.complex_gaussian(k);
    Eigen::Index d = kernel_basis(p.eval(c), tol).cols();
    r.max = std::max(r.max, d);
    r.min = std::min(r.min, d);
  }
  return r;
}

inline Eigen::Index appendix_kernel_dim(const AppendixPencil& p, const VecC& c, double tol = kDefaultTol) {
  return kernel_basis(p.eval(c), tol).cols();
}

// Case 1 pencil whose theta_1 = u w^t has isotropic u (u^t u = 0), so Theta^t Theta = 0 at
// c = (1, 1, 0, 0) and the kernel is 7-dimensional.
inline AppendixPencil isotropic_rank_one_pencil(Rng& rng) {
  AppendixPencil p = appendix_pencil(1, rng);
  VecD a = rng.gaussian(8), b = rng.gaussian(8);
  b -= a * (a.dot(b) / a.squaredNorm());
  b *= a.norm() / b.norm();
  VecC u(8);
  for (int i = 0; i < 8; ++i) u(i) = Complex(a(i), b(i));
  p.theta[0] = u * rng.gaussian(7).cast<Complex>().transpose();
  return p;
}

}  // namespace fkm

#endif  // FKM_PENCIL_HPP
