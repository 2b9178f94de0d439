#include "tat/curve.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "tat/analytic.hpp"
#include "tat/errors.hpp"

namespace tat {

QuadElem CmOrder::generator() const {
  // gamma = (t + sqrt(disc))/2 = t/2 + (f/2) sqrt(d) with disc = f^2 d.
  long disc = discriminant();
  long d = field();
  long f2 = disc / d;
  long f = 1;
  while (f * f < f2) ++f;
  if (f * f != f2) throw DomainError("order discriminant is not a square times a squarefree integer");
  return QuadElem(mpq_class(trace, 2), mpq_class(sign * f, 2), d);
}

CurveSpec::CurveSpec(mpz_class A, mpz_class B, int N, std::optional<CmOrder> cm)
    : A_(std::move(A)), B_(std::move(B)), N_(N), cm_(cm) {
  disc_ = -16 * (4 * A_ * A_ * A_ + 27 * B_ * B_);
  if (disc_ == 0) throw DomainError("singular curve: discriminant is zero");
  if (N_ < 1) throw DomainError("ambient power N must be positive");
  if (cm_) {
    if (cm_->discriminant() >= 0) throw DomainError("cm order must be imaginary quadratic");
    if (cm_->sign != 1 && cm_->sign != -1) throw DomainError("cm embedding sign must be +1 or -1");
  }
}

mpz_class CurveSpec::segre_dim() const {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(N_));
  return p - 1;
}

mpq_class CurveSpec::j_invariant() const {
  mpz_class a4 = 4 * A_;
  mpq_class j(-1728 * a4 * a4 * a4, disc_);
  j.canonicalize();
  return j;
}

UniPoly CurveSpec::cubic() const { return UniPoly({B_, A_, 0, 1}); }

std::array<QuadElem, 3> CurvePoint::projective() const {
  if (is_identity) return {QuadElem(0), QuadElem(1), QuadElem(0)};
  return {x, y, QuadElem(1)};
}

long CurvePoint::field() const {
  if (is_identity) return 0;
  return x.d() != 0 ? x.d() : y.d();
}

std::string CurvePoint::to_string() const {
  if (is_identity) return "[0:1:0]";
  return "(" + x.to_string() + "," + y.to_string() + ")";
}

bool operator==(const CurvePoint& p, const CurvePoint& q) {
  if (p.is_identity || q.is_identity) return p.is_identity == q.is_identity;
  return p.x == q.x && p.y == q.y;
}

bool on_curve(const CurvePoint& p, const CurveSpec& curve) {
  if (p.is_identity) return true;
  QuadElem rhs = p.x * p.x * p.x + QuadElem(curve.A()) * p.x + QuadElem(curve.B());
  return p.y * p.y == rhs;
}

CurvePoint negate(const CurvePoint& p) {
  if (p.is_identity) return p;
  return {p.x, -p.y};
}

namespace {

void require_on_curve(const CurvePoint& p, const CurveSpec& curve) {
  if (!on_curve(p, curve)) throw DomainError("point " + p.to_string() + " is not on the curve");
}

CurvePoint add_unchecked(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve) {
  if (p.is_identity) return q;
  if (q.is_identity) return p;
  QuadElem lambda;
  if (p.x == q.x) {
    if (p.y == -q.y) return CurvePoint::identity();
    lambda = (QuadElem(3) * p.x * p.x + QuadElem(curve.A())) / (QuadElem(2) * p.y);
  } else {
    lambda = (q.y - p.y) / (q.x - p.x);
  }
  QuadElem x3 = lambda * lambda - p.x - q.x;
  QuadElem y3 = lambda * (p.x - x3) - p.y;
  return {x3, y3};
}

CurvePoint mul_unchecked(mpz_class k, const CurvePoint& p, const CurveSpec& curve) {
  CurvePoint base = k < 0 ? negate(p) : p;
  if (k < 0) k = -k;
  CurvePoint acc = CurvePoint::identity();
  size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    acc = add_unchecked(acc, acc, curve);
    if (mpz_tstbit(k.get_mpz_t(), i)) acc = add_unchecked(acc, base, curve);
  }
  return acc;
}

}  // namespace

CurvePoint group_add(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve) {
  require_on_curve(p, curve);
  require_on_curve(q, curve);
  return add_unchecked(p, q, curve);
}

CurvePoint group_sub(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve) {
  return group_add(p, negate(q), curve);
}

CurvePoint scalar_mul(const mpz_class& k, const CurvePoint& p, const CurveSpec& curve) {
  require_on_curve(p, curve);
  if (k == 0) return CurvePoint::identity();
  return mul_unchecked(k, p, curve);
}

namespace {

/// [gamma]p computed through the period lattice and recognised exactly.
CurvePoint cm_generator_image(const CurvePoint& p, const CurveSpec& curve, int precision_bits) {
  if (p.is_identity) return p;
  const CmOrder& cm = *curve.cm();
  long d = cm.field();
  if (p.field() != 0 && p.field() != d)
    throw DomainError("CM action on a point outside Q(sqrt " + std::to_string(d) + ") is not supported");
  // Height of the image is about norm times that of p; size the search accordingly.
  double hp = std::max(log_abs(p.x.a().get_den()) + 1.0, 1.0);
  if (!p.x.is_rational()) hp = std::max(hp, log_abs(p.x.b().get_den()) + 1.0);
  for (int bits = precision_bits; bits <= 8192; bits *= 2) {
    PrecisionGuard guard(bits);
    PeriodLattice lat = compute_periods(curve, bits);
    Complex<Real> z = elliptic_log(p, lat, curve);
    Complex<Real> gz = cm.embed<Real>() * z;
    NumericPoint img = elliptic_exp(gz, lat, curve);
    if (img.is_identity) return CurvePoint::identity();
    double den_digits = std::min(bits * 0.3 * 0.45, 4.0 * static_cast<double>(cm.norm) * hp / 2.302585 + 8.0);
    mpz_class max_den;
    mpz_ui_pow_ui(max_den.get_mpz_t(), 10, static_cast<unsigned long>(den_digits));
    Real tol = pow(Real(2), -bits / 2);
    auto x = recognize_quadratic(img.x, d, cm.sign, max_den, tol * (1 + abs(img.x)));
    auto y = recognize_quadratic(img.y, d, cm.sign, max_den, tol * (1 + abs(img.y)));
    if (x && y) {
      CurvePoint q(*x, *y);
      if (on_curve(q, curve)) return q;
    }
  }
  throw PrecisionError("could not recognise the CM image of " + p.to_string());
}

}  // namespace

CurvePoint scalar_mul(const EndElem& k, const CurvePoint& p, const CurveSpec& curve, int precision_bits) {
  require_on_curve(p, curve);
  if (k.is_integer()) return scalar_mul(k.a, p, curve);
  if (!curve.cm()) throw DomainError("endomorphism outside Z on a curve without declared CM");
  CurvePoint gp = cm_generator_image(p, curve, precision_bits);
  return add_unchecked(mul_unchecked(k.a, p, curve), mul_unchecked(k.b, gp, curve), curve);
}

AmbientPoint ambient_add(const AmbientPoint& p, const AmbientPoint& q, const CurveSpec& curve) {
  if (p.size() != q.size()) throw DomainError("ambient points of different length");
  AmbientPoint r;
  for (int i = 0; i < p.size(); ++i) r.factors.push_back(group_add(p.factors[i], q.factors[i], curve));
  return r;
}

CurvePoint apply_row(const std::vector<EndElem>& u, const AmbientPoint& p, const CurveSpec& curve) {
  if (static_cast<int>(u.size()) != p.size()) throw DomainError("row length differs from the ambient power");
  CurvePoint acc = CurvePoint::identity();
  for (int i = 0; i < p.size(); ++i) acc = group_add(acc, scalar_mul(u[i], p.factors[i], curve), curve);
  return acc;
}

UniPoly division_polynomial(int n, const CurveSpec& curve) {
  if (n < 0) throw DomainError("division polynomial index must be nonnegative");
  const mpz_class& A = curve.A();
  const mpz_class& B = curve.B();
  UniPoly R = curve.cubic();
  UniPoly R2x16 = mpz_class(16) * (R * R);
  std::vector<UniPoly> f(std::max(n + 1, 5));
  f[0] = UniPoly();
  f[1] = UniPoly({1});
  f[2] = UniPoly({1});
  f[3] = UniPoly({-A * A, 12 * B, 6 * A, 0, 3});
  f[4] = mpz_class(2) * UniPoly({-8 * B * B - A * A * A, -4 * A * B, -5 * A * A, 20 * B, 5 * A, 0, 1});
  for (int k = 5; k <= n; ++k) {
    int m = k / 2;
    if (k % 2 == 1) {
      UniPoly a = f[m + 2] * f[m] * f[m] * f[m];
      UniPoly b = f[m - 1] * f[m + 1] * f[m + 1] * f[m + 1];
      f[k] = (m % 2 == 0) ? R2x16 * a - b : a - R2x16 * b;
    } else {
      f[k] = f[m] * (f[m + 2] * f[m - 1] * f[m - 1] - f[m - 2] * f[m + 1] * f[m + 1]);
    }
  }
  return f[n];
}

int exact_order(const CurvePoint& p, const CurveSpec& curve, int max_n) {
  require_on_curve(p, curve);
  CurvePoint acc = CurvePoint::identity();
  for (int n = 1; n <= max_n; ++n) {
    acc = add_unchecked(acc, p, curve);
    if (acc.is_identity) return n;
  }
  return 0;
}

std::vector<CurvePoint> search_rational_points(const CurveSpec& curve, long bound, long bound_den) {
  std::vector<std::pair<double, CurvePoint>> out;
  for (long b = 1; b <= bound_den; ++b) {
    mpz_class b2 = mpz_class(b) * b;
    for (long a = -bound; a <= bound; ++a) {
      if (std::gcd(a, b) != 1) continue;
      mpq_class x(a, b2);
      x.canonicalize();
      mpq_class rhs = x * x * x + curve.A() * x + curve.B();
      if (rhs < 0) continue;
      mpz_class num = rhs.get_num(), den = rhs.get_den();
      if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) continue;
      mpq_class y(sqrt(num), sqrt(den));
      double h = std::max(log_abs(x.get_den()), x.get_num() == 0 ? 0.0 : log_abs(x.get_num()));
      out.push_back({h, CurvePoint(QuadElem(x), QuadElem(y))});
      if (y != 0) out.push_back({h, CurvePoint(QuadElem(x), QuadElem(mpq_class(-y)))});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    if (l.first != r.first) return l.first < r.first;
    if (l.second.x.a() != r.second.x.a()) return l.second.x.a() < r.second.x.a();
    return l.second.y.a() < r.second.y.a();
  });
  std::vector<CurvePoint> pts;
  for (auto& e : out) pts.push_back(e.second);
  return pts;
}

}  // namespace tat
