#ifndef FKM_SCALAR_HPP
#define FKM_SCALAR_HPP

#include <gmpxx.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Literal;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  static inline int max_digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

}  // namespace Eigen

namespace fkm {

using Rational = mpq_class;
using Complex = std::complex<double>;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatD = Mat<double>;
using VecD = Vec<double>;
using MatQ = Mat<Rational>;
using VecQ = Vec<Rational>;
using MatC = Mat<Complex>;
using VecC = Vec<Complex>;

inline constexpr double kDefaultTol = 1e-9;

enum class ScalarMode { exact, float64 };

inline const char* to_string(ScalarMode m) {
  return m == ScalarMode::exact ? "exact" : "float64";
}

inline ScalarMode parse_scalar_mode(const std::string& s) {
  if (s == "exact") return ScalarMode::exact;
  if (s == "float64") return ScalarMode::float64;
  throw std::invalid_argument("unknown scalar mode: " + s);
}

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr ScalarMode mode = ScalarMode::float64;
  static double magnitude(double v) { return std::abs(v); }
  static double to_double(double v) { return v; }
  static std::string str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr ScalarMode mode = ScalarMode::exact;
  // Nonzero rationals never report magnitude 0.
  static double magnitude(const Rational& v) {
    double d = std::abs(v.get_d());
    return (d == 0.0 && v != 0) ? std::numeric_limits<double>::min() : d;
  }
  static double to_double(const Rational& v) { return v.get_d(); }
  static std::string str(const Rational& v) { return v.get_str(); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr ScalarMode mode = ScalarMode::float64;
  static double magnitude(const Complex& v) { return std::abs(v); }
};

template <class T>
constexpr bool is_exact_v = ScalarTraits<T>::exact;

template <class T>
double magnitude(const T& v) {
  return ScalarTraits<T>::magnitude(v);
}

// Largest entry magnitude; 0 for empty matrices.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  using T = typename Derived::Scalar;
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = ScalarTraits<T>::magnitude(T(m(i, j)));
      if (std::isnan(v)) return v;
      out = std::max(out, v);
    }
  return out;
}

template <class T>
bool is_zero(const T& v, double tol) {
  if constexpr (is_exact_v<T>)
    return v == 0;
  else
    return magnitude(v) <= tol;
}

template <class T>
Mat<double> to_double(const Mat<T>& m) {
  if constexpr (std::is_same_v<T, double>) {
    return m;
  } else {
    Mat<double> out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out(i, j) = ScalarTraits<T>::to_double(m(i, j));
    return out;
  }
}

template <class T>
Vec<double> to_double(const Vec<T>& v) {
  Vec<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = ScalarTraits<T>::to_double(v(i));
  return out;
}

}  // namespace fkm

#endif  // FKM_SCALAR_HPP
