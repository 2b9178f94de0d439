#pragma once

#include <gmpxx.h>

#include <cmath>
#include <utility>
#include <vector>

#include "tat/curve.hpp"
#include "tat/numeric.hpp"

namespace tat {

/// Lattice Lambda = Z omega1 + Z omega2 of the uniformisation
/// z -> (wp(z), wp'(z)/2), reduced so that tau = omega2/omega1 lies in the
/// standard fundamental domain.
struct PeriodLattice {
  Complex<Real> omega1;
  Complex<Real> omega2;
  Complex<Real> tau;
  int precision_bits = 0;
  /// Bound on the error of omega1, omega2, tau from a precision comparison.
  double error_radius = 0.0;

  /// a*omega1 + b*omega2.
  Complex<Real> period(const mpq_class& a, const mpq_class& b) const;
};

/// A point of E(C) given numerically.
struct NumericPoint {
  Complex<Real> x;
  Complex<Real> y;
  bool is_identity = false;
  double radius = 0.0;
};

/// An n-torsion point together with its period coordinates (a/n, b/n).
struct TorsionPoint {
  NumericPoint point;
  mpq_class a;
  mpq_class b;
  int order = 1;
};

/// Weierstrass functions for a fixed lattice at scalar type S (double,
/// long double or Real), via q-expansions in w = z/omega1.
template <class S>
class WeierstrassModel {
 public:
  using C = Complex<S>;

  WeierstrassModel(const C& omega1, const C& omega2, const S& A, const S& B, int bits)
      : w1_(omega1), w2_(omega2), A_(A), B_(B) {
    tau_ = w2_ / w1_;
    const S two_pi = S(2) * pi_v<S>();
    q_ = std::exp(C(S(0), two_pi) * tau_);
    i2pi_ = C(S(0), two_pi);
    using std::log;
    S lq = -log(std::abs(q_));
    terms_ = static_cast<int>(std::ceil(bits * 0.6931471805599453 / to_double(lq))) + 3;
    C qn(1);
    for (int n = 1; n <= terms_; ++n) {
      qn *= q_;
      eta_sum_ += qn / ((C(1) - qn) * (C(1) - qn));
    }
  }

  const C& omega1() const { return w1_; }
  const C& omega2() const { return w2_; }
  const C& tau() const { return tau_; }
  const S& A() const { return A_; }
  const S& B() const { return B_; }

  /// Real coordinates (s, t) with z = s*omega1 + t*omega2.
  std::pair<S, S> coords(const C& z) const {
    C w = z / w1_;
    S t = w.imag() / tau_.imag();
    S s = w.real() - t * tau_.real();
    return {s, t};
  }
  C from_coords(const S& s, const S& t) const { return w1_ * s + w2_ * t; }

  /// Representative of z with coordinates in [0, 1).
  C reduce(const C& z) const {
    auto [s, t] = coords(z);
    using std::floor;
    return from_coords(s - floor(s), t - floor(t));
  }

  /// Distance-like measure of z from Lambda in coordinate units.
  S lattice_distance(const C& z) const {
    auto [s, t] = coords(z);
    using std::round;
    S ds = s - round(s);
    S dt = t - round(t);
    return std::abs(w1_ * ds + w2_ * dt) / std::abs(w1_);
  }

  /// (wp(z), wp'(z)/2); undefined at lattice points.
  std::pair<C, C> xy(const C& z) const {
    auto [s, t] = coords(z);
    using std::floor;
    using std::round;
    t -= round(t);
    s -= floor(s);
    C w = C(s, S(0)) + tau_ * t;
    C u = std::exp(i2pi_ * w);
    C uinv = C(1) / u;
    C sum_p = u / ((C(1) - u) * (C(1) - u));
    C sum_d = u * (C(1) + u) / ((C(1) - u) * (C(1) - u) * (C(1) - u));
    C qn(1);
    for (int n = 1; n <= terms_; ++n) {
      qn *= q_;
      C a = qn * u;
      C b = qn * uinv;
      C ia = C(1) - a;
      C ib = C(1) - b;
      sum_p += a / (ia * ia) + b / (ib * ib);
      sum_d += a * (C(1) + a) / (ia * ia * ia) - b * (C(1) + b) / (ib * ib * ib);
    }
    C i2 = i2pi_ * i2pi_;
    C wp = i2 * (C(S(1) / S(12)) + sum_p - C(2) * eta_sum_);
    C wpd = i2 * i2pi_ * sum_d;
    C w1sq = w1_ * w1_;
    return {wp / w1sq, wpd / (w1sq * w1_) / C(2)};
  }

 private:
  C w1_, w2_, tau_, q_, i2pi_;
  C eta_sum_{0};
  S A_, B_;
  int terms_ = 0;
};

/// Periods of the curve at the given precision (>= 64 bits), with an error
/// radius below 2^(-precision_bits + 8).
PeriodLattice compute_periods(const CurveSpec& curve, int precision_bits);

/// Lower-precision model of the lattice for fast numerical work.
template <class S>
WeierstrassModel<S> model_of(const PeriodLattice& lat, const CurveSpec& curve) {
  return WeierstrassModel<S>(complex_cast<S>(lat.omega1), complex_cast<S>(lat.omega2),
                             from_mpq<S>(mpq_class(curve.A())), from_mpq<S>(mpq_class(curve.B())),
                             std::is_same_v<S, Real> ? lat.precision_bits : 64);
}

/// [wp(z) : wp'(z)/2 : 1], or the identity when z lies in Lambda.
NumericPoint elliptic_exp(const Complex<Real>& z, const PeriodLattice& lat, const CurveSpec& curve);

/// z with elliptic_exp(z) = p, reduced to the fundamental parallelogram.
Complex<Real> elliptic_log(const CurvePoint& p, const PeriodLattice& lat, const CurveSpec& curve);
Complex<Real> elliptic_log(const NumericPoint& p, const PeriodLattice& lat, const CurveSpec& curve);

/// Coordinates (s, t) in [0,1)^2 of z modulo Lambda.
std::pair<Real, Real> period_coordinates(const Complex<Real>& z, const PeriodLattice& lat);

/// The n^2 points exp((a omega1 + b omega2)/n), 0 <= a, b < n.
std::vector<TorsionPoint> torsion_points(int n, const CurveSpec& curve, const PeriodLattice& lat);

/// Checks the points of torsion_points(n) against the roots of the n-th
/// division polynomial: every non-2-torsion x refines by Newton to a root
/// of f_n and the distinct x-values exhaust its degree. Requires n <= 12.
bool certify_torsion(int n, const std::vector<TorsionPoint>& pts, const CurveSpec& curve);

/// Numerical group law on E(C).
NumericPoint numeric_add(const NumericPoint& p, const NumericPoint& q, const CurveSpec& curve);

}  // namespace tat
