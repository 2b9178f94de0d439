#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "tat/numeric.hpp"

namespace tat {

/// Squarefree part of a nonzero integer (sign kept).
long squarefree_part(long n);

/// Element a + b*sqrt(d) of Q(sqrt d), d squarefree and != 1. Rational
/// elements have b == 0 and are compatible with every field. The complex
/// embedding sends sqrt(d) to +sqrt(d) for d > 0 and to sign*i*sqrt(|d|)
/// for d < 0, where sign is fixed per process through the curve's CM data.
class QuadElem {
 public:
  QuadElem() = default;
  QuadElem(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  QuadElem(const mpz_class& v) : a_(v) {}  // NOLINT
  QuadElem(const mpq_class& v) : a_(v) {}  // NOLINT
  QuadElem(mpq_class a, mpq_class b, long d);

  const mpq_class& a() const { return a_; }
  const mpq_class& b() const { return b_; }
  long d() const { return d_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  QuadElem conj() const;
  mpq_class norm() const { return a_ * a_ - b_ * b_ * d_; }
  mpq_class trace() const { return 2 * a_; }

  QuadElem& operator+=(const QuadElem& o);
  QuadElem& operator-=(const QuadElem& o);
  QuadElem& operator*=(const QuadElem& o);
  QuadElem& operator/=(const QuadElem& o);
  QuadElem operator-() const { return QuadElem(-a_, -b_, d_); }

  friend QuadElem operator+(QuadElem x, const QuadElem& y) { return x += y; }
  friend QuadElem operator-(QuadElem x, const QuadElem& y) { return x -= y; }
  friend QuadElem operator*(QuadElem x, const QuadElem& y) { return x *= y; }
  friend QuadElem operator/(QuadElem x, const QuadElem& y) { return x /= y; }
  friend bool operator==(const QuadElem& x, const QuadElem& y);
  friend bool operator!=(const QuadElem& x, const QuadElem& y) { return !(x == y); }

  /// Complex value under the embedding with the given sign of sqrt(d) for d < 0.
  template <class Scalar>
  Complex<Scalar> embed(int sign = 1) const {
    Scalar a = from_mpq<Scalar>(a_);
    if (b_ == 0) return {a, Scalar(0)};
    Scalar b = from_mpq<Scalar>(b_);
    using std::sqrt;
    if (d_ > 0) return {a + b * sqrt(Scalar(d_)), Scalar(0)};
    return {a, Scalar(sign) * b * sqrt(Scalar(-d_))};
  }

  std::string to_string() const;

 private:
  static long join(long d1, long d2);
  void normalize();

  mpq_class a_{0};
  mpq_class b_{0};
  long d_ = 0;  // 0 for a rational element
};

/// Recovers a rational with denominator at most max_den from a real value
/// by continued fractions; empty when the residual exceeds tol.
std::optional<mpq_class> recognize_rational(const Real& x, const mpz_class& max_den, const Real& tol);

/// Recovers an element of Q(sqrt d) (d < 0) from its complex value.
std::optional<QuadElem> recognize_quadratic(const Complex<Real>& z, long d, int sign, const mpz_class& max_den,
                                            const Real& tol);

}  // namespace tat
