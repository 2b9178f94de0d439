#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "tat/errors.hpp"
#include "tat/variety.hpp"

using namespace tat;

namespace {

MultiPoly P(const std::string& s, int N) { return parse_polynomial(s, affine_variable_names(N)); }

// y^2 = x^3 - 43x + 42 = (x+7)(x-1)(x-6), T = (1,0), Q = (-3,-12).
const CurveSpec E3(-43, 42, 3);

std::array<MultiPoly, 2> planted() {
  return {P("(x1-1)*(x2-1)+40", 3), P("(x3+3) + x2*(y3+12) + y1*(x2-1)^2 - 40*y2", 3)};
}

std::vector<QuadElem> coords(const std::vector<CurvePoint>& pts) {
  std::vector<QuadElem> v;
  for (const auto& p : pts) {
    v.push_back(p.x);
    v.push_back(p.y);
  }
  return v;
}

}  // namespace

TEST_CASE("reduction modulo the curve equations") {
  CurveSpec E(-43, 42, 1);
  MultiPoly f = P("y1^3 + y1^2", 1);
  MultiPoly r = reduce_mod_curve(f, E);
  CHECK(r.to_string({"x1", "y1"}) == P("y1*(x1^3-43*x1+42) + x1^3 - 43*x1 + 42", 1).to_string({"x1", "y1"}));
  CHECK(pole_weights(f, E) == std::vector<int>{9});
  // y^2 - x^3 - A x - B vanishes on E.
  CHECK(reduce_mod_curve(P("y1^2 - x1^3 + 43*x1 - 42", 1), E).is_zero());
}

TEST_CASE("pole-order degree bound") {
  auto eqs = planted();
  CHECK(pole_weights(eqs[0], E3) == std::vector<int>{2, 2, 0});
  CHECK(pole_weights(eqs[1], E3) == std::vector<int>{3, 4, 3});
  // 3 * (2*4 + 2*3 + 2*3 + 2*3) = 78.
  CHECK(degree_upper_bound(eqs, E3) == 78);

  // Product of two fibres: {x1 = 2} x {x2 = 5} in E^2 is 4 points, the bound is sharp.
  CurveSpec E2(-43, 42, 2);
  CHECK(degree_upper_bound({P("x1-2", 2), P("x2-5", 2)}, E2) == 4);
}

TEST_CASE("degree bound dominates an independent elimination count") {
  // x1 = 3 - 2 x2 and y1 = y2 - x1 - 5 on E^2. Eliminating y1 and y2 leaves
  // num(x2)^2 = 4 (8 - 2 x2)^2 cubic(x2), where
  // num = cubic(x2) + (8 - 2 x2)^2 - cubic(3 - 2 x2).
  CurveSpec E2(-43, 42, 2);
  UniPoly cubic = E2.cubic();
  auto compose = [&](const UniPoly& f, const UniPoly& g) {
    UniPoly acc;
    for (int i = f.degree(); i >= 0; --i) acc = acc * g + UniPoly({f.coeff(i)});
    return acc;
  };
  UniPoly lin({mpz_class(3), mpz_class(-2)});
  UniPoly e8({mpz_class(8), mpz_class(-2)});
  UniPoly num = cubic + e8 * e8 - compose(cubic, lin);
  UniPoly elim = num * num - mpz_class(4) * (e8 * e8 * cubic);
  CHECK(elim.degree() == 6);
  // Squarefree: the discriminant-style resultant with the derivative is nonzero.
  std::vector<mpz_class> d;
  for (int i = 1; i <= elim.degree(); ++i) d.push_back(elim.coeff(i) * i);
  CHECK(resultant(elim, UniPoly(d)) != 0);
  // Each root x2 gives one point, so V has 6 points of degree 1 each.
  mpz_class bound = degree_upper_bound({P("x1+2*x2-3", 2), P("y1-y2+x1+5", 2)}, E2);
  CHECK(bound == 12);
  CHECK(bound >= 6);

  // The numerical solver finds exactly those 6 points.
  VarietyModel v = make_variety({P("x1+2*x2-3", 2), P("y1-y2+x1+5", 2)}, E2, std::nullopt, 0.0);
  PeriodLattice lat = compute_periods(E2, 96);
  VarietyEvaluator<double> ev(v, E2, lat);
  AffineParam<double> prm;
  prm.beta = {{1.0, 0.0}, {0.0, 1.0}};
  prm.base = {0.0, 0.0};
  SeededUniform rng(7);
  std::set<std::pair<long, long>> xs;
  const auto& m = ev.model();
  for (int s = 0; s < 400; ++s) {
    auto sol = newton_solve(ev, prm, {m.from_coords(rng.next(), rng.next()), m.from_coords(rng.next(), rng.next())}, 1e-12);
    if (!sol) continue;
    CHECK(sol->rank == 2);
    auto [x2, y2] = m.xy(sol->z[1]);
    xs.insert({std::lround(x2.real() * 1e6), std::lround(x2.imag() * 1e6)});
  }
  CHECK(xs.size() == 6);
}

TEST_CASE("planted translate lies on V exactly") {
  auto eqs = planted();
  CurvePoint T(QuadElem(1), QuadElem(0));
  CurvePoint Q(QuadElem(-3), QuadElem(-12));
  auto pts = search_rational_points(CurveSpec(-43, 42, 1), 40, 2);
  REQUIRE(pts.size() >= 4);
  for (const auto& P1 : pts) {
    CurvePoint P2 = group_add(P1, T, E3);
    if (P1.is_identity || P2.is_identity) continue;
    auto c = coords({P1, P2, Q});
    for (const auto& f : eqs) CHECK(f.eval<QuadElem>(std::span<const QuadElem>(c)).is_zero());
  }
}

TEST_CASE("make_variety validation") {
  VarietyModel v = make_variety(planted(), E3, std::nullopt, 0.0);
  CHECK(v.deg_V == 78);
  CHECK(v.deg_source == DegreeSource::pole_bound);
  CHECK(v.dim_V == 1);
  VarietyModel u = make_variety(planted(), E3, mpz_class(40), 2.5);
  CHECK(u.deg_V == 40);
  CHECK(u.deg_source == DegreeSource::user);

  auto eqs = planted();
  // f2 = x1 f1 cuts only codimension 1 where f1 = 0.
  CHECK_THROWS_AS(make_variety({eqs[0], eqs[0] * P("x1", 3)}, E3, std::nullopt, 0.0), DomainError);
  CHECK_THROWS_AS(make_variety({eqs[0], P("7", 3)}, E3, std::nullopt, 0.0), DomainError);
  CHECK_THROWS_AS(make_variety({eqs[0], P("y1^2 - x1^3 + 43*x1 - 42", 3)}, E3, std::nullopt, 0.0), DomainError);
  CHECK_THROWS_AS(make_variety(planted(), E3, mpz_class(0), 0.0), DomainError);
  CHECK_THROWS_AS(make_variety(planted(), E3, std::nullopt, -1.0), DomainError);
  CHECK_THROWS_AS(make_variety({P("x1", 1), P("y1", 1)}, CurveSpec(-43, 42, 1), std::nullopt, 0.0), DomainError);
}
