#ifndef FKM_VSPACE_HPP
#define FKM_VSPACE_HPP

#include "fkm/mirror.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fkm {

// V = V_+^* + V_-^* + V_0^* at x^*, read off the adapted frame at x:
// V_+^* = (n_1, n_2, n_B), V_-^* = (e_1, e_2, v), V_0^* = kernel part of E_-.
struct VSubspace {
  FocalFrame<double> star;  // normals (n^*, U_k, f)
  MatD vp, vm, v0;

  MatD basis() const { return hstack<double>({vp, vm, v0}); }
};

inline VSubspace v_subspace(const AdaptedFrame& af) {
  VSubspace v;
  v.star = star_frame(af.frame);
  v.vp = af.frame.normals.middleCols(1, 3);
  v.vm = af.vk;
  v.v0 = af.wk;
  if (v.vp.cols() != 3 || v.vm.cols() != 3 || v.v0.cols() != 4)
    throw std::runtime_error("v_subspace: kernel dimensions differ from (3, 3, 4)");
  return v;
}

struct VRestriction {
  double p_high = 0.0;  // max |p*_j| over j >= 5
  double q_all = 0.0;   // max |q*_j| over all j
};

inline VRestriction restrict_to_V(const IsoparametricPolynomial<double>& poly, const VSubspace& v, int samples,
                                  Rng& rng) {
  VRestriction r;
  MatD b = v.basis();
  for (int k = 0; k < samples; ++k) {
    VecD y = b * rng.unit_vector(b.cols());
    auto e = expansion_pq(poly, v.star, y);
    r.p_high = std::max(r.p_high, e.p.tail(e.p.size() - 5).cwiseAbs().maxCoeff());
    r.q_all = std::max(r.q_all, e.q.cwiseAbs().maxCoeff());
  }
  return r;
}

inline VecD quat_product(const VecD& a, const VecD& b) {
  Quaternion<double> qa{a(0), a(1), a(2), a(3)}, qb{b(0), b(1), b(2), b(3)};
  auto p = quat_mul(qa, qb);
  VecD out(4);
  out << p[0], p[1], p[2], p[3];
  return out;
}

// p^*(v,v) on V in quaternion coordinates: -sqrt2 (x z + y o z) with x, y imaginary and z in H.
struct QuaternionFit {
  std::string circ;           // "left": y o z = y z, "right": y o z = z y
  double residual = std::numeric_limits<double>::infinity();
  double orthogonality = 0.0;  // max |M^t M - I| over the identifying maps
  double other_residual = 0.0; // best residual for the other product order
};

inline QuaternionFit fit_quaternion_form(const IsoparametricPolynomial<double>& poly, const VSubspace& v,
                                         int samples, Rng& rng) {
  const double r2 = std::sqrt(2.0);
  auto pstar = [&](const VecD& y) { return VecD(expansion_pq(poly, v.star, y).p); };
  auto pol = [&](const VecD& a, const VecD& b) { return VecD((pstar(a + b) - pstar(a - b)).segment(1, 4) / 4.0); };
  auto phi = [&](const VecD& x, const VecD& z) { return VecD(2.0 * pol(v.vp * x, v.v0 * z)); };
  auto psi = [&](const VecD& y, const VecD& z) { return VecD(2.0 * pol(v.vm * y, v.v0 * z)); };
  const VecD g0 = VecD::Unit(4, 0);
  MatD l0(4, 3), l0p(4, 3);
  for (int i = 0; i < 3; ++i) {
    l0.col(i) = -phi(VecD::Unit(3, i), g0) / r2;
    l0p.col(i) = -psi(VecD::Unit(3, i), g0) / r2;
  }
  Eigen::JacobiSVD<MatD> svd(MatD(l0.transpose()), Eigen::ComputeFullV);
  VecD one = svd.matrixV().col(3);
  const VecD qi = VecD::Unit(4, 1);
  double best[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double orth[2] = {0.0, 0.0};
  for (int so : {1, -1}) {
    for (int s3 : {1, -1}) {
      MatD xb = MatD::Identity(3, 3);
      xb(2, 2) = s3;
      MatD nmat(4, 4);
      nmat << so * one, l0 * xb;
      MatD ymat = l0p.colPivHouseholderQr().solve(MatD(l0 * xb));
      MatD phii(4, 4);
      for (int kk = 0; kk < 4; ++kk) phii.col(kk) = phi(xb.col(0), VecD::Unit(4, kk));
      for (int c = 0; c < 2; ++c) {
        MatD zmat(4, 4);
        for (int bb = 0; bb < 4; ++bb)
          zmat.col(bb) = phii.colPivHouseholderQr().solve(VecD(-r2 * nmat * quat_product(qi, VecD::Unit(4, bb))));
        double res = 0.0;
        for (int k = 0; k < samples; ++k) {
          VecD xq = VecD::Zero(4), yq = VecD::Zero(4);
          xq.tail(3) = rng.gaussian(3);
          yq.tail(3) = rng.gaussian(3);
          VecD zq = rng.gaussian(4);
          VecD y = v.vp * (xb * xq.tail(3)) + v.vm * (ymat * yq.tail(3)) + v.v0 * (zmat * zq);
          VecD lhs = nmat.colPivHouseholderQr().solve(VecD(pstar(y).segment(1, 4)));
          VecD rhs = -r2 * (quat_product(xq, zq) + (c == 0 ? quat_product(yq, zq) : quat_product(zq, yq)));
          res = std::max(res, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        if (res < best[c]) {
          best[c] = res;
          orth[c] = 0.0;
          for (const MatD* m : {&nmat, &ymat, &zmat})
            orth[c] = std::max(orth[c], max_abs(MatD(m->transpose() * *m - MatD::Identity(m->cols(), m->cols()))));
        }
      }
    }
  }
  QuaternionFit fit;
  const int c = best[0] <= best[1] ? 0 : 1;
  fit.circ = c == 0 ? "left" : "right";
  fit.residual = best[c];
  fit.orthogonality = orth[c];
  fit.other_residual = best[1 - c];
  return fit;
}

}  // namespace fkm

#endif  // FKM_VSPACE_HPP
