#ifndef FKM_RNG_HPP
#define FKM_RNG_HPP

#include "fkm/scalar.hpp"

#include <cstdint>
#include <random>

namespace fkm {

// splitmix64 step; used to expand a run seed into independent task streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of task `stream` under run seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  std::uint64_t t = a ^ (stream * 0xD1B54A32D192ED03ULL);
  return splitmix64(t);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : gen_(derive_seed(seed, stream)) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  long uniform_int(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }

  VecD gaussian(Eigen::Index n) {
    VecD v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  MatD gaussian(Eigen::Index r, Eigen::Index c) {
    MatD m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }

  VecC complex_gaussian(Eigen::Index n) {
    VecC v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(), normal());
    return v;
  }

  MatC complex_gaussian(Eigen::Index r, Eigen::Index c) {
    MatC m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = Complex(normal(), normal());
    return m;
  }

  VecD unit_vector(Eigen::Index n) {
    VecD v = gaussian(n);
    return v / v.norm();
  }

  // Haar-distributed orthogonal matrix (QR with sign fix).
  MatD orthogonal(Eigen::Index n) {
    Eigen::HouseholderQR<MatD> qr(gaussian(n, n));
    MatD q = qr.householderQ();
    MatD r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  }

  Rational rational(long num_bound = 9, long den_bound = 7) {
    long p = uniform_int(-num_bound, num_bound);
    long q = uniform_int(1, den_bound);
    Rational r(p, q);
    r.canonicalize();
    return r;
  }

  VecQ rational_vector(Eigen::Index n, long num_bound = 9, long den_bound = 7) {
    VecQ v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rational(num_bound, den_bound);
    return v;
  }

  // Random vector in the scalar type of the run.
  template <class T>
  Vec<T> vector(Eigen::Index n) {
    if constexpr (is_exact_v<T>)
      return rational_vector(n);
    else
      return gaussian(n);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace fkm

#endif  // FKM_RNG_HPP
