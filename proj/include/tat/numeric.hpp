#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

#include <cmath>
#include <complex>

namespace tat {

/// Arbitrary-precision real used where more than 53 bits are needed.
using Real = boost::multiprecision::mpfr_float;
template <class Scalar>
using Complex = std::complex<Scalar>;

inline unsigned bits_to_digits10(int bits) { return static_cast<unsigned>(bits * 0.30103) + 2; }

/// Sets the working precision of newly created Real values for the
/// lifetime of the guard. The default is process-wide, so numerical work
/// at different precisions must not run concurrently.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(int bits) : saved_(Real::default_precision()) {
    Real::default_precision(bits_to_digits10(bits));
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

/// Natural log of |z| for a nonzero big integer, accurate to double precision.
inline double log_abs(const mpz_class& z) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

inline double log_abs(const mpq_class& q) { return log_abs(q.get_num()) - log_abs(q.get_den()); }

template <class Scalar>
Scalar from_mpq(const mpq_class& q) {
  if constexpr (std::is_same_v<Scalar, Real>) {
    Real num(q.get_num().get_mpz_t());
    Real den(q.get_den().get_mpz_t());
    return num / den;
  } else {
    return static_cast<Scalar>(q.get_d());
  }
}

inline mpz_class floor_mpz(const Real& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.backend().data(), MPFR_RNDD);
  return z;
}

template <class Scalar>
Scalar pi_v() {
  if constexpr (std::is_same_v<Scalar, Real>) {
    return boost::math::constants::pi<Real>();
  } else {
    return static_cast<Scalar>(3.141592653589793238462643383279502884L);
  }
}

template <class Scalar>
double to_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Real>) {
    return x.template convert_to<double>();
  } else {
    return static_cast<double>(x);
  }
}

template <class To, class From>
Complex<To> complex_cast(const Complex<From>& z) {
  if constexpr (std::is_same_v<To, From>) {
    return z;
  } else if constexpr (std::is_same_v<From, Real>) {
    return {static_cast<To>(z.real().template convert_to<long double>()),
            static_cast<To>(z.imag().template convert_to<long double>())};
  } else {
    return {To(z.real()), To(z.imag())};
  }
}

/// A value with an absolute error radius.
struct Ball {
  double value = 0.0;
  double radius = 0.0;
  bool contains(double x) const { return std::fabs(x - value) <= radius; }
};

}  // namespace tat
