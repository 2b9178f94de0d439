#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "tat/analytic.hpp"
#include "tat/errors.hpp"

using namespace tat;

namespace {

using cd = std::complex<double>;

// Affine chord-and-tangent law over Q, written out independently.
struct RP {
  mpq_class x, y;
  bool inf = false;
};
RP oracle_add(const RP& p, const RP& q, const mpq_class& A) {
  if (p.inf) return q;
  if (q.inf) return p;
  if (p.x == q.x && p.y + q.y == 0) return {0, 0, true};
  mpq_class l = p.x == q.x ? mpq_class((3 * p.x * p.x + A) / (2 * p.y)) : mpq_class((q.y - p.y) / (q.x - p.x));
  mpq_class x3 = l * l - p.x - q.x;
  return {x3, l * (p.x - x3) - p.y, false};
}
RP to_rp(const CurvePoint& P) {
  if (P.is_identity) return {0, 0, true};
  return {P.x.a(), P.y.a(), false};
}
bool same(const RP& a, const RP& b) { return a.inf == b.inf && (a.inf || (a.x == b.x && a.y == b.y)); }

cd to_cd(const Complex<Real>& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

// g2, g3 of the lattice from Eisenstein series in q = exp(2 pi i tau).
std::pair<cd, cd> invariants(cd w1, cd tau) {
  const double pi = std::acos(-1.0);
  cd q = std::exp(cd(0, 2 * pi) * tau);
  cd e4 = 1, e6 = 1, qn = 1;
  for (int n = 1; n < 40; ++n) {
    qn *= q;
    double s3 = 0, s5 = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) s3 += std::pow(d, 3), s5 += std::pow(d, 5);
    e4 += 240.0 * s3 * qn;
    e6 -= 504.0 * s5 * qn;
  }
  cd u = cd(2 * pi) / w1;
  return {std::pow(u, 4) * e4 / 12.0, std::pow(u, 6) * e6 / 216.0};
}

}  // namespace

TEST_CASE("discriminant and j-invariant") {
  CurveSpec e(-1, 0), f(0, 1), g(-43, 42);
  CHECK(e.discriminant() == 64);
  CHECK(e.j_invariant() == 1728);
  CHECK(f.j_invariant() == 0);
  CHECK(g.discriminant() == -16 * (4 * mpz_class(-43) * -43 * -43 + 27 * 42 * 42));
  CHECK_THROWS_AS(CurveSpec(0, 0), DomainError);
  CHECK(g.segre_dim() == 2);
  CHECK(g.with_power(3).segre_dim() == 26);
}

TEST_CASE("group law matches the affine formulas") {
  CurveSpec E(-43, 42);
  auto pts = search_rational_points(E, 40, 3);
  REQUIRE(pts.size() >= 6);
  for (const auto& P : pts) CHECK(on_curve(P, E));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      CurvePoint s = group_add(pts[i], pts[j], E);
      CHECK(same(to_rp(s), oracle_add(to_rp(pts[i]), to_rp(pts[j]), E.A())));
      CHECK(s == group_add(pts[j], pts[i], E));
      CHECK(group_add(group_add(pts[i], pts[j], E), pts[0], E) == group_add(pts[i], group_add(pts[j], pts[0], E), E));
    }
  const CurvePoint& P = pts[0];
  CHECK(group_add(P, negate(P), E).is_identity);
  CHECK(group_sub(P, P, E).is_identity);
  RP acc{0, 0, true};
  for (int k = 1; k <= 9; ++k) {
    acc = oracle_add(acc, to_rp(P), E.A());
    CHECK(same(to_rp(scalar_mul(mpz_class(k), P, E)), acc));
  }
  CHECK(scalar_mul(mpz_class(-3), P, E) == negate(scalar_mul(mpz_class(3), P, E)));
}

TEST_CASE("torsion orders on y^2 = x^3 + 1") {
  CurveSpec E(0, 1);
  CHECK(exact_order(CurvePoint(QuadElem(-1), QuadElem(0)), E) == 2);
  CHECK(exact_order(CurvePoint(QuadElem(0), QuadElem(1)), E) == 3);
  CHECK(exact_order(CurvePoint(QuadElem(2), QuadElem(3)), E) == 6);
  // f_3 = 3x^4 + 6Ax^2 + 12Bx - A^2 vanishes at the 3-torsion abscissa 0.
  UniPoly f3 = division_polynomial(3, E);
  CHECK(f3.eval(QuadElem(0)).is_zero());
  CHECK(f3.eval(QuadElem(2)) == QuadElem(3 * 16 + 24));
  CurveSpec G(-43, 42);
  // x^3 - 43x + 42 = (x - 1)(x - 6)(x + 7); the other searched points have infinite order here.
  for (const auto& P : search_rational_points(G, 40, 3)) CHECK(exact_order(P, G) == (P.y.is_zero() ? 2 : 0));
}

TEST_CASE("rational point search against brute force") {
  CurveSpec E(-16, 16);
  auto pts = search_rational_points(E, 30, 2);
  std::size_t oracle = 0;
  for (long b = 1; b <= 2; ++b)
    for (long a = -30; a <= 30; ++a) {
      mpq_class x(a, b * b);
      x.canonicalize();
      if (x.get_den() != b * b) continue;
      mpq_class r = x * x * x - 16 * x + 16;
      if (r < 0) continue;
      if (!mpz_perfect_square_p(r.get_num().get_mpz_t()) || !mpz_perfect_square_p(r.get_den().get_mpz_t())) continue;
      oracle += r == 0 ? 1 : 2;
    }
  CHECK(pts.size() == oracle);
  for (const auto& P : pts) CHECK(on_curve(P, E));
}

TEST_CASE("period lattices reproduce g2 = -4A and g3 = -4B") {
  for (auto [A, B] : {std::pair{-1L, 0L}, {0L, 1L}, {-43L, 42L}, {-16L, 16L}, {-7L, 10L}}) {
    CurveSpec E(A, B);
    PeriodLattice lat = compute_periods(E, 128);
    cd tau = to_cd(lat.tau);
    CHECK(tau.imag() > 0);
    CHECK(std::abs(tau.real()) <= 0.5 + 1e-12);
    CHECK(std::abs(tau) >= 1 - 1e-12);
    auto [g2, g3] = invariants(to_cd(lat.omega1), tau);
    CHECK(std::abs(g2 - cd(-4.0 * A)) < 1e-9 * (1 + std::abs(4.0 * A)));
    CHECK(std::abs(g3 - cd(-4.0 * B)) < 1e-9 * (1 + std::abs(4.0 * B)));
    CHECK(lat.error_radius < 1e-30);
  }
  PeriodLattice sq = compute_periods(CurveSpec(-1, 0), 128);
  CHECK(std::abs(to_cd(sq.tau) - cd(0, 1)) < 1e-20);
}

TEST_CASE("elliptic log and exp are inverse and additive") {
  CurveSpec E(-43, 42);
  PeriodLattice lat = compute_periods(E, 160);
  auto pts = search_rational_points(E, 30, 2);
  REQUIRE(pts.size() >= 4);
  for (std::size_t i = 0; i < 4; ++i) {
    NumericPoint q = elliptic_exp(elliptic_log(pts[i], lat, E), lat, E);
    CHECK(std::abs(to_cd(q.x) - cd(pts[i].x.a().get_d())) < 1e-30);
    CHECK(std::abs(to_cd(q.y) - cd(pts[i].y.a().get_d())) < 1e-30);
    for (std::size_t j = 0; j < 4; ++j) {
      PrecisionGuard guard(160);
      Complex<Real> z = elliptic_log(pts[i], lat, E) + elliptic_log(pts[j], lat, E) -
                        elliptic_log(group_add(pts[i], pts[j], E), lat, E);
      auto [s, t] = period_coordinates(z, lat);
      double ds = std::min(static_cast<double>(s), 1 - static_cast<double>(s));
      double dt = std::min(static_cast<double>(t), 1 - static_cast<double>(t));
      CHECK(ds < 1e-30);
      CHECK(dt < 1e-30);
    }
  }
}

TEST_CASE("torsion points are certified, including roots at x = 0") {
  for (auto [A, B] : {std::pair{-1L, 1L}, {-1L, 0L}, {0L, 1L}, {-43L, 42L}}) {
    CurveSpec E(A, B);
    PeriodLattice lat = compute_periods(E, 192);
    for (int n = 1; n <= 6; ++n) {
      auto pts = torsion_points(n, E, lat);
      CHECK(pts.size() == static_cast<std::size_t>(n * n));
      CHECK(certify_torsion(n, pts, E));
      // [n] kills every point numerically.
      for (const auto& t : pts) {
        NumericPoint acc;
        acc.is_identity = true;
        for (int k = 0; k < n; ++k) acc = numeric_add(acc, t.point, E);
        if (!acc.is_identity) CHECK(std::abs(to_cd(acc.x)) > 1e20);
      }
    }
  }
  // A wrong set of points is rejected.
  CurveSpec E(-43, 42);
  PeriodLattice lat = compute_periods(E, 192);
  auto five = torsion_points(5, E, lat);
  five.pop_back();
  CHECK_FALSE(certify_torsion(5, five, E));
}

TEST_CASE("CM action on y^2 = x^3 - x") {
  CurveSpec E(-1, 0, 1, CmOrder{0, 1, 1});
  CurvePoint P = search_rational_points(E, 30, 4).at(0);
  REQUIRE_FALSE(P.is_identity);
  CurvePoint iP = scalar_mul(EndElem(0, 1), P, E);
  CHECK(on_curve(iP, E));
  // [i](x, y) = (-x, +-i y).
  CHECK(iP.x == -P.x);
  CHECK((iP.y * iP.y) == -(P.y * P.y));
  CHECK(scalar_mul(EndElem(0, 1), iP, E) == negate(P));
  CHECK(scalar_mul(EndElem(2, 0), P, E) == scalar_mul(mpz_class(2), P, E));
  AmbientPoint p{{P, P}};
  CHECK(apply_row({EndElem(1), EndElem(-1)}, p, E.with_power(2)).is_identity);
}
