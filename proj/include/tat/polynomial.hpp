#pragma once

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tat/quadratic.hpp"

namespace tat {

/// Dense univariate polynomial with integer coefficients, lowest degree first.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<mpz_class> coeffs);
  static UniPoly monomial(const mpz_class& c, int deg);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<mpz_class>& coeffs() const { return c_; }
  mpz_class coeff(int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : mpz_class(0); }

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(const mpz_class& s, const UniPoly& a);

  template <class T>
  T eval(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }
  QuadElem eval(const QuadElem& x) const;

  template <class Scalar>
  Complex<Scalar> eval_complex(const Complex<Scalar>& x) const {
    Complex<Scalar> acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + Complex<Scalar>(from_mpq<Scalar>(mpq_class(*it)));
    return acc;
  }

  /// Homogenised evaluation sum c_i X^i Z^(deg-i) at integers.
  mpz_class eval_homogeneous(const mpz_class& X, const mpz_class& Z, int deg) const;

 private:
  void trim();
  std::vector<mpz_class> c_;
};

/// Sylvester-matrix resultant of two integer polynomials.
mpz_class resultant(const UniPoly& f, const UniPoly& g);

/// Sparse multivariate polynomial with rational coefficients.
class MultiPoly {
 public:
  using Exponent = std::vector<int>;

  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}
  static MultiPoly constant(int nvars, const mpq_class& c);
  static MultiPoly variable(int nvars, int index);

  int nvars() const { return nvars_; }
  const std::map<Exponent, mpq_class>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int total_degree() const;
  /// Largest total degree in the variable group {2i, 2i+1}.
  int group_degree(int group) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  MultiPoly operator-() const;
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, const MultiPoly& b) { return a *= b; }
  MultiPoly pow(int e) const;
  MultiPoly derivative(int var) const;

  template <class T>
  T eval(std::span<const T> values) const {
    T acc(0);
    for (const auto& [e, c] : terms_) {
      T t = coeff_as<T>(c);
      for (int v = 0; v < nvars_; ++v)
        for (int k = 0; k < e[v]; ++k) t = t * values[v];
      acc = acc + t;
    }
    return acc;
  }

  /// Sum of |coefficient * monomial| at the given point; the natural scale
  /// for a relative residual.
  template <class Scalar>
  Scalar magnitude(std::span<const Complex<Scalar>> values) const {
    using std::abs;
    Scalar acc(0);
    for (const auto& [e, c] : terms_) {
      Scalar t = abs(from_mpq<Scalar>(c));
      for (int v = 0; v < nvars_; ++v)
        for (int k = 0; k < e[v]; ++k) t = t * abs(values[v]);
      acc += t;
    }
    return acc;
  }

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  template <class T>
  static T coeff_as(const mpq_class& c) {
    if constexpr (std::is_same_v<T, QuadElem>) {
      return QuadElem(c);
    } else {
      using S = typename T::value_type;
      return T(from_mpq<S>(c), S(0));
    }
  }
  void trim();

  int nvars_ = 0;
  std::map<Exponent, mpq_class> terms_;
};

/// Variable names x1, y1, ..., xN, yN in index order.
std::vector<std::string> affine_variable_names(int n);

/// Parses an expression with + - * ^, parentheses, rational literals and
/// the named variables. Division is allowed by constants only. Throws
/// std::invalid_argument with the column of the failure.
MultiPoly parse_polynomial(const std::string& text, const std::vector<std::string>& names);

}  // namespace tat
