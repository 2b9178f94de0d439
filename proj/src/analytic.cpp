#include "tat/analytic.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "tat/errors.hpp"

namespace tat {

namespace {

using C = Complex<Real>;

Real agm(Real a, Real b, int bits) {
  Real eps = pow(Real(2), -bits - 4);
  for (int it = 0; it < 10000; ++it) {
    Real an = (a + b) / 2;
    Real bn = sqrt(a * b);
    a = an;
    b = bn;
    if (abs(a - b) <= eps * abs(a)) return a;
  }
  throw PrecisionError("AGM did not converge");
}

Real refine_root(Real x, const Real& A, const Real& B) {
  for (int it = 0; it < 200; ++it) {
    Real f = x * x * x + A * x + B;
    Real df = 3 * x * x + A;
    if (df == 0) break;
    Real step = f / df;
    x -= step;
    if (abs(step) <= abs(x) * pow(Real(2), -static_cast<int>(Real::default_precision() * 3.33))) break;
  }
  return x;
}

/// Unreduced periods (omega1, omega2) of dx/(2y).
std::pair<C, C> raw_periods(const CurveSpec& curve, int bits) {
  Real A(curve.A().get_mpz_t());
  Real B(curve.B().get_mpz_t());
  Real pi = pi_v<Real>();
  if (curve.discriminant() > 0) {
    Real r = 2 * sqrt(-A / 3);
    Real arg = (3 * B / (2 * A)) * sqrt(-3 / A);
    if (arg > 1) arg = 1;
    if (arg < -1) arg = -1;
    Real theta = acos(arg);
    std::array<Real, 3> e;
    for (int k = 0; k < 3; ++k) e[k] = refine_root(r * cos(theta / 3 - 2 * pi * k / 3), A, B);
    std::sort(e.begin(), e.end(), [](const Real& l, const Real& rr) { return l > rr; });
    Real w1 = pi / agm(sqrt(e[0] - e[2]), sqrt(e[0] - e[1]), bits);
    Real w2 = pi / agm(sqrt(e[0] - e[2]), sqrt(e[1] - e[2]), bits);
    return {C(w1, 0), C(0, w2)};
  }
  Real D = B * B / 4 + A * A * A / 27;
  Real sd = sqrt(D);
  Real u = -B / 2 + sd;
  Real v = -B / 2 - sd;
  Real e1 = (u < 0 ? -cbrt(-u) : cbrt(u)) + (v < 0 ? -cbrt(-v) : cbrt(v));
  e1 = refine_root(e1, A, B);
  Real a = 3 * e1;
  Real b = sqrt(3 * e1 * e1 + A);
  Real w1 = 2 * pi / agm(2 * sqrt(b), sqrt(2 * b + a), bits);
  Real w2i = pi / agm(2 * sqrt(b), sqrt(2 * b - a), bits);
  return {C(w1, 0), C(-w1 / 2, w2i)};
}

struct Reduction {
  // (omega1', omega2') = (a omega1 + b omega2, c omega1 + d omega2)
  long a = 1, b = 0, c = 0, d = 1;
};

Reduction reduce_basis(C w1, C w2, int bits) {
  Reduction m;
  Real tol = pow(Real(2), -bits / 2);
  auto apply = [&](long a, long b, long c, long d) {
    C n1 = w1 * Real(a) + w2 * Real(b);
    C n2 = w1 * Real(c) + w2 * Real(d);
    w1 = n1;
    w2 = n2;
    Reduction r{a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    m = r;
  };
  if ((w2 / w1).imag() < 0) apply(1, 0, 0, -1);
  for (int it = 0; it < 1000; ++it) {
    C tau = w2 / w1;
    Real re = tau.real();
    if (abs(re) > Real(0.5) + tol) {
      long n = std::lround(to_double(re));
      apply(1, 0, -n, 1);
      continue;
    }
    if (std::abs(tau) < Real(1) - tol) {
      apply(0, 1, -1, 0);
      continue;
    }
    break;
  }
  return m;
}

}  // namespace

Complex<Real> PeriodLattice::period(const mpq_class& a, const mpq_class& b) const {
  PrecisionGuard guard(precision_bits);
  return omega1 * from_mpq<Real>(a) + omega2 * from_mpq<Real>(b);
}

PeriodLattice compute_periods(const CurveSpec& curve, int precision_bits) {
  if (precision_bits < 64) throw DomainError("precision_bits must be at least 64");
  int hi_bits = precision_bits + 64;
  PrecisionGuard hi_guard(hi_bits);
  auto [h1, h2] = raw_periods(curve, hi_bits);
  Reduction m = reduce_basis(h1, h2, hi_bits);
  C w1 = h1 * Real(m.a) + h2 * Real(m.b);
  C w2 = h1 * Real(m.c) + h2 * Real(m.d);
  C l1, l2;
  {
    PrecisionGuard lo_guard(precision_bits);
    auto [r1, r2] = raw_periods(curve, precision_bits);
    l1 = r1 * Real(m.a) + r2 * Real(m.b);
    l2 = r1 * Real(m.c) + r2 * Real(m.d);
  }
  Real diff = std::max(std::abs(w1 - l1), std::abs(w2 - l2));
  Real scale = std::max(Real(1), std::abs(w1) + std::abs(w2));
  double radius = 4.0 * to_double(diff) * to_double(scale);
  double cap = std::ldexp(1.0, -precision_bits + 8);
  if (!(radius < cap)) throw PrecisionError("period computation did not reach the requested precision");
  PeriodLattice lat;
  lat.omega1 = w1;
  lat.omega2 = w2;
  lat.tau = w2 / w1;
  lat.precision_bits = precision_bits;
  lat.error_radius = std::max(radius, std::ldexp(1.0, -precision_bits - 8));
  return lat;
}

std::pair<Real, Real> period_coordinates(const Complex<Real>& z, const PeriodLattice& lat) {
  PrecisionGuard guard(lat.precision_bits);
  C w = z / lat.omega1;
  Real t = w.imag() / lat.tau.imag();
  Real s = w.real() - t * lat.tau.real();
  s -= floor(s);
  t -= floor(t);
  return {s, t};
}

NumericPoint elliptic_exp(const Complex<Real>& z, const PeriodLattice& lat, const CurveSpec& curve) {
  PrecisionGuard guard(lat.precision_bits);
  auto model = model_of<Real>(lat, curve);
  Real dist = model.lattice_distance(z);
  NumericPoint p;
  if (dist <= pow(Real(2), -lat.precision_bits + 16)) {
    p.is_identity = true;
    p.x = C(0);
    p.y = C(1);
    return p;
  }
  if (dist < pow(Real(2), -lat.precision_bits / 2))
    throw PrecisionError("argument too close to a lattice point for the working precision");
  auto [x, y] = model.xy(z);
  p.x = x;
  p.y = y;
  double rel = std::ldexp(1.0, -lat.precision_bits + 12) / to_double(dist) + lat.error_radius * 64;
  p.radius = rel * (1.0 + to_double(std::abs(x)) + to_double(std::abs(y)));
  return p;
}

namespace {

Complex<Real> log_from_xy(const C& x0, const C& y0, const PeriodLattice& lat, const CurveSpec& curve) {
  int bits = lat.precision_bits;
  PrecisionGuard guard(bits);
  auto md = model_of<double>(lat, curve);
  auto mr = model_of<Real>(lat, curve);
  using Cd = Complex<double>;
  Cd xd = complex_cast<double>(x0);
  Cd yd = complex_cast<double>(y0);
  Cd best;
  double best_err = 1e300;
  if (std::abs(xd) > 1e6) {
    best = Cd(1.0) / std::sqrt(xd);
    best_err = 0;
  } else {
    const int G = 24;
    for (int i = 0; i < G; ++i)
      for (int j = 0; j < G; ++j) {
        Cd z = md.from_coords((i + 0.5) / G, (j + 0.5) / G);
        auto [x, y] = md.xy(z);
        double err = std::abs(x - xd) / (1.0 + std::abs(xd));
        if (err < best_err) {
          best_err = err;
          best = z;
        }
      }
  }
  // Newton on wp(z) - x0 in double, then at full precision.
  Cd z = best;
  for (int it = 0; it < 60; ++it) {
    auto [x, y] = md.xy(z);
    if (std::abs(y) < 1e-300) break;
    Cd step = (x - xd) / (2.0 * y);
    z -= step;
    if (std::abs(step) < 1e-15 * (1 + std::abs(z))) break;
  }
  C zr(Real(z.real()), Real(z.imag()));
  Real eps = pow(Real(2), -bits + 12);
  for (int it = 0; it < 200; ++it) {
    auto [x, y] = mr.xy(zr);
    if (std::abs(y) == 0) break;
    C step = (x - x0) / (Real(2) * y);
    zr -= step;
    if (std::abs(step) <= eps * (1 + std::abs(zr))) break;
  }
  auto [xf, yf] = mr.xy(zr);
  if (std::abs(yf + y0) < std::abs(yf - y0)) zr = -zr;
  (void)yd;
  return mr.reduce(zr);
}

}  // namespace

Complex<Real> elliptic_log(const NumericPoint& p, const PeriodLattice& lat, const CurveSpec& curve) {
  PrecisionGuard guard(lat.precision_bits);
  if (p.is_identity) return C(0);
  Real tiny = pow(Real(2), -lat.precision_bits / 2) * (1 + std::abs(p.x));
  if (std::abs(p.y) <= tiny) {
    // 2-torsion: pick the half period whose x-coordinate matches.
    auto mr = model_of<Real>(lat, curve);
    std::array<C, 3> halves = {lat.omega1 / Real(2), lat.omega2 / Real(2), (lat.omega1 + lat.omega2) / Real(2)};
    C best = halves[0];
    Real best_err = -1;
    for (const auto& h : halves) {
      Real err = std::abs(mr.xy(h).first - p.x);
      if (best_err < 0 || err < best_err) {
        best_err = err;
        best = h;
      }
    }
    return best;
  }
  return log_from_xy(p.x, p.y, lat, curve);
}

Complex<Real> elliptic_log(const CurvePoint& p, const PeriodLattice& lat, const CurveSpec& curve) {
  if (!on_curve(p, curve)) throw DomainError("point " + p.to_string() + " is not on the curve");
  PrecisionGuard guard(lat.precision_bits);
  NumericPoint n;
  n.is_identity = p.is_identity;
  int sign = curve.cm() ? curve.cm()->sign : 1;
  if (!p.is_identity) {
    n.x = p.x.embed<Real>(sign);
    n.y = p.y.embed<Real>(sign);
    if (p.y.is_zero()) n.y = C(0);
  }
  return elliptic_log(n, lat, curve);
}

std::vector<TorsionPoint> torsion_points(int n, const CurveSpec& curve, const PeriodLattice& lat) {
  if (n < 1) throw DomainError("torsion order must be positive");
  PrecisionGuard guard(lat.precision_bits);
  std::vector<TorsionPoint> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      TorsionPoint t;
      t.a = mpq_class(a, n);
      t.b = mpq_class(b, n);
      t.a.canonicalize();
      t.b.canonicalize();
      int g = std::gcd(std::gcd(a, b), n);
      t.order = n / g;
      if (a == 0 && b == 0) {
        t.point.is_identity = true;
        t.point.x = C(0);
        t.point.y = C(1);
      } else {
        t.point = elliptic_exp(lat.period(t.a, t.b), lat, curve);
      }
      out.push_back(std::move(t));
    }
  return out;
}

bool certify_torsion(int n, const std::vector<TorsionPoint>& pts, const CurveSpec& curve) {
  if (n < 1 || n > 12) throw DomainError("torsion certification is offered for 1 <= n <= 12");
  if (static_cast<int>(pts.size()) != n * n) return false;
  UniPoly f = division_polynomial(n, curve);
  UniPoly R = curve.cubic();
  int bits = 256;
  PrecisionGuard guard(bits);
  Real rel_tol = pow(Real(2), -bits / 3);
  auto residual_ok = [&](const UniPoly& poly, const C& x) {
    C val = poly.eval_complex<Real>(x);
    Real mag(1);
    Real ax = std::abs(x);
    Real pw(1);
    for (const auto& c : poly.coeffs()) {
      mag += abs(Real(c.get_mpz_t())) * pw;
      pw *= ax;
    }
    return std::abs(val) <= rel_tol * mag;
  };
  std::vector<C> xs;
  for (const auto& t : pts) {
    if (t.point.is_identity) continue;
    bool two_torsion = mpq_class(2 * t.a).get_den() == 1 && mpq_class(2 * t.b).get_den() == 1;
    if (two_torsion) {
      if (!residual_ok(R, t.point.x)) return false;
      continue;
    }
    if (!residual_ok(f, t.point.x)) return false;
    bool seen = false;
    for (const auto& x : xs)
      if (std::abs(x - t.point.x) <= pow(Real(2), -bits / 4) * (1 + std::abs(x))) seen = true;
    if (!seen) xs.push_back(t.point.x);
  }
  int expected = f.degree() < 0 ? 0 : f.degree();
  return static_cast<int>(xs.size()) == expected;
}

NumericPoint numeric_add(const NumericPoint& p, const NumericPoint& q, const CurveSpec& curve) {
  if (p.is_identity) return q;
  if (q.is_identity) return p;
  PrecisionGuard guard(static_cast<int>(p.x.real().precision() * 3.3219));
  Real A(curve.A().get_mpz_t());
  Real tol = pow(Real(2), -static_cast<int>(Real::default_precision() * 3.32 / 2));
  Real scale = 1 + std::abs(p.x) + std::abs(q.x);
  C lambda;
  if (std::abs(p.x - q.x) <= tol * scale) {
    if (std::abs(p.y + q.y) <= tol * (1 + std::abs(p.y))) {
      NumericPoint o;
      o.is_identity = true;
      o.x = C(0);
      o.y = C(1);
      return o;
    }
    lambda = (Real(3) * p.x * p.x + A) / (Real(2) * p.y);
  } else {
    lambda = (q.y - p.y) / (q.x - p.x);
  }
  NumericPoint r;
  r.x = lambda * lambda - p.x - q.x;
  r.y = lambda * (p.x - r.x) - p.y;
  r.radius = (p.radius + q.radius) * (1 + to_double(std::abs(lambda))) * 4;
  return r;
}

}  // namespace tat
