#pragma once

#include <gmpxx.h>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tat/polynomial.hpp"
#include "tat/quadratic.hpp"

namespace tat {

/// End(E) as the order Z[gamma], gamma^2 - trace*gamma + norm = 0, with
/// gamma embedded as (trace + sign*i*sqrt(4*norm - trace^2))/2.
struct CmOrder {
  long trace = 0;
  long norm = 1;
  int sign = 1;

  /// trace^2 - 4 norm; negative for an imaginary quadratic order.
  long discriminant() const { return trace * trace - 4 * norm; }
  /// Squarefree d with Q(gamma) = Q(sqrt d).
  long field() const { return squarefree_part(discriminant()); }
  /// gamma as an element of Q(sqrt d).
  QuadElem generator() const;

  template <class Scalar>
  Complex<Scalar> embed() const {
    using std::sqrt;
    Scalar t(trace);
    Scalar im = sqrt(Scalar(-discriminant()));
    return {t / 2, Scalar(sign) * im / 2};
  }
};

/// Element a + b*gamma of End(E); b must be zero without CM.
struct EndElem {
  mpz_class a{0};
  mpz_class b{0};
  EndElem() = default;
  EndElem(long v) : a(v) {}  // NOLINT(google-explicit-constructor)
  EndElem(mpz_class a_, mpz_class b_) : a(std::move(a_)), b(std::move(b_)) {}
  bool is_integer() const { return b == 0; }
  friend bool operator==(const EndElem& x, const EndElem& y) { return x.a == y.a && x.b == y.b; }
};

/// y^2 = x^3 + A x + B together with End(E) data and the ambient power N.
class CurveSpec {
 public:
  CurveSpec(mpz_class A, mpz_class B, int N = 1, std::optional<CmOrder> cm = std::nullopt);

  const mpz_class& A() const { return A_; }
  const mpz_class& B() const { return B_; }
  int N() const { return N_; }
  const std::optional<CmOrder>& cm() const { return cm_; }
  /// -16(4A^3 + 27B^2).
  const mpz_class& discriminant() const { return disc_; }
  /// 3^N - 1.
  mpz_class segre_dim() const;
  /// j = -1728 (4A)^3 / Delta.
  mpq_class j_invariant() const;
  /// x^3 + A x + B.
  UniPoly cubic() const;
  /// Same curve with a different ambient power.
  CurveSpec with_power(int N) const { return CurveSpec(A_, B_, N, cm_); }
  /// End(E) rank over Z: 1 or 2.
  int end_rank() const { return cm_ ? 2 : 1; }

 private:
  mpz_class A_, B_;
  int N_;
  std::optional<CmOrder> cm_;
  mpz_class disc_;
};

/// A point of E with coordinates in Q or a quadratic field; the identity
/// is [0:1:0] and carries is_identity.
struct CurvePoint {
  QuadElem x{0};
  QuadElem y{1};
  bool is_identity = true;

  CurvePoint() = default;
  CurvePoint(QuadElem x_, QuadElem y_) : x(std::move(x_)), y(std::move(y_)), is_identity(false) {}
  static CurvePoint identity() { return {}; }

  std::array<QuadElem, 3> projective() const;
  bool is_rational() const { return x.is_rational() && y.is_rational(); }
  /// Quadratic field of the coordinates (0 when rational).
  long field() const;
  std::string to_string() const;
  friend bool operator==(const CurvePoint& p, const CurvePoint& q);
  friend bool operator!=(const CurvePoint& p, const CurvePoint& q) { return !(p == q); }
};

/// P = (P_1, ..., P_N) in E^N.
struct AmbientPoint {
  std::vector<CurvePoint> factors;
  int size() const { return static_cast<int>(factors.size()); }
  friend bool operator==(const AmbientPoint& p, const AmbientPoint& q) { return p.factors == q.factors; }
};

bool on_curve(const CurvePoint& p, const CurveSpec& curve);
CurvePoint negate(const CurvePoint& p);
CurvePoint group_add(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve);
CurvePoint group_sub(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve);
/// [k]p by double-and-add.
CurvePoint scalar_mul(const mpz_class& k, const CurvePoint& p, const CurveSpec& curve);
/// [k]p for k in End(E); the CM part acts through the period lattice and
/// the result is verified exactly on the curve.
CurvePoint scalar_mul(const EndElem& k, const CurvePoint& p, const CurveSpec& curve, int precision_bits = 256);

AmbientPoint ambient_add(const AmbientPoint& p, const AmbientPoint& q, const CurveSpec& curve);
/// sum_j u_j P_j over the factors of p (a morphism E^N -> E).
CurvePoint apply_row(const std::vector<EndElem>& u, const AmbientPoint& p, const CurveSpec& curve);

/// The polynomial f_n in x with psi_n = f_n (n odd) and psi_n = 2y f_n
/// (n even); its roots are the x-coordinates of points of exact order
/// dividing n other than the 2-torsion.
UniPoly division_polynomial(int n, const CurveSpec& curve);

/// Smallest n <= max_n with [n]p = O, or 0 when none.
int exact_order(const CurvePoint& p, const CurveSpec& curve, int max_n = 12);

/// Rational points with x = a/b^2, |a| <= bound, b <= bound_den, sorted
/// by (height, x, y) and with both signs of y.
std::vector<CurvePoint> search_rational_points(const CurveSpec& curve, long bound, long bound_den);

}  // namespace tat
