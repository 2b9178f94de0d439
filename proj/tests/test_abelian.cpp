#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>

#include "tat/abelian.hpp"

using namespace tat;

namespace {

IntVec iv(std::initializer_list<long> xs) {
  IntVec v;
  for (long x : xs) v.push_back(x);
  return v;
}

long gcd3(long a, long b, long c) { return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)); }

bool first_positive(std::initializer_list<long> xs) {
  for (long x : xs)
    if (x != 0) return x > 0;
  return false;
}

}  // namespace

TEST_CASE("degree anchors without CM") {
  CurveSpec e1(-1, 1, 1);
  EndModule m1(e1);
  CHECK(degree(AbelianSubvariety::full(m1)) == 3);
  CurveSpec e2(-1, 1, 2);
  EndModule m2(e2);
  CHECK(degree(AbelianSubvariety(m2, {iv({1, 1})})) == 6);
  CHECK(degree(AbelianSubvariety::full(m2)) == 18);
  CHECK(degree(AbelianSubvariety(m2, {iv({1, 2})})) == 15);
  CHECK(degree(AbelianSubvariety(m2, {iv({2, 4})})) == 15);
  CurveSpec e3(-1, 1, 3);
  EndModule m3(e3);
  // Plane x1 + x2 + x3 = 0: Plucker vector (1,1,1), degree 2! 3^2 * 3.
  AbelianSubvariety plane(m3, {iv({1, -1, 0}), iv({0, 1, -1})});
  CHECK(degree(plane) == 54);
  CHECK(degree(orth_complement(plane)) == 9);
}

TEST_CASE("module operations") {
  CurveSpec e(-1, 1, 3);
  EndModule m(e);
  AbelianSubvariety a(m, {iv({1, 1, 0})});
  AbelianSubvariety b(m, {iv({0, 0, 1})});
  AbelianSubvariety s = sum(a, b);
  CHECK(s.dim() == 2);
  CHECK(s.contains(a));
  CHECK(s.contains(iv({2, 2, 5})));
  CHECK_FALSE(s.contains(iv({1, 0, 0})));
  AbelianSubvariety c(m, {iv({1, 0, 0}), iv({0, 1, 1})});
  AbelianSubvariety i = intersect_identity_component(s, c);
  CHECK(i.dim() == 1);
  CHECK(i.contains(iv({1, 1, 1})));
  CHECK(orth_complement(orth_complement(s)) == s);
  CHECK(orth_complement(AbelianSubvariety::zero(m)) == AbelianSubvariety::full(m));

  CurveSpec e2(-1, 1, 2);
  EndModule m2(e2);
  AbelianSubvariety diag(m2, {iv({1, 1})});
  // Delta cap anti-diagonal = E[2] embedded diagonally.
  CHECK(intersection_with_complement_order(diag) == 4);
  KernelMorphism km = kernel_morphism(diag);
  REQUIRE(km.rows.size() == 1);
  CHECK(km.r == 1);
  CHECK(km.rows[0][0].a == -km.rows[0][1].a);
  CHECK(abs(km.rows[0][0].a) == 1);
}

TEST_CASE("enumeration in E^2 matches a primitive-vector count") {
  CurveSpec e(-1, 1, 2);
  for (long maxdeg : {3L, 6L, 15L, 30L, 60L}) {
    auto res = enumerate_subvarieties(e, maxdeg);
    CHECK(res.complete);
    int expected = 0;
    for (long a = -10; a <= 10; ++a)
      for (long b = -10; b <= 10; ++b)
        if (first_positive({a, b}) && std::gcd(std::abs(a), std::abs(b)) == 1 && 3 * (a * a + b * b) <= maxdeg)
          ++expected;
    CHECK(static_cast<int>(res.items.size()) == expected);
    for (size_t k = 1; k < res.items.size(); ++k) CHECK(degree(res.items[k - 1]) <= degree(res.items[k]));
  }
}

TEST_CASE("enumeration in E^3 matches Plucker coordinates") {
  CurveSpec e(-1, 1, 3);
  for (long maxdeg : {36L, 54L, 120L}) {
    auto res = enumerate_subvarieties(e, maxdeg);
    CHECK(res.complete);
    int lines = 0, planes = 0;
    for (long a = -8; a <= 8; ++a)
      for (long b = -8; b <= 8; ++b)
        for (long c = -8; c <= 8; ++c) {
          if (!first_positive({a, b, c}) || gcd3(a, b, c) != 1) continue;
          long n = a * a + b * b + c * c;
          if (3 * n <= maxdeg) ++lines;
          if (18 * n <= maxdeg) ++planes;
        }
    int got_lines = 0, got_planes = 0;
    for (auto& b : res.items) (b.dim() == 1 ? got_lines : got_planes)++;
    CHECK(got_lines == lines);
    CHECK(got_planes == planes);
  }
}

TEST_CASE("budget truncation is reported") {
  CurveSpec e(-1, 1, 3);
  auto res = enumerate_subvarieties(e, 200, Budget{50});
  CHECK_FALSE(res.complete);
}

TEST_CASE("CM by Z[i]") {
  CmOrder zi{0, 1, 1};
  CurveSpec e(-1, 0, 2, zi);
  EndModule m(e);
  auto [p, q, r, s] = m.period_action();
  // gamma^2 = -1 on the period basis.
  CHECK(p * p + q * r == -1);
  CHECK(q * (p + s) == 0);
  CHECK(r * p + s * r == 0);
  CHECK(r * q + s * s == -1);
  CHECK(degree(AbelianSubvariety::full(EndModule(e.with_power(1)))) == 3);
  AbelianSubvariety diag(m, {iv({1, 0, 1, 0})});
  CHECK(diag.dim() == 1);
  CHECK(degree(diag) == 6);
  // Graph of gamma: (1, i); |1|^2 + |i|^2 = 2.
  AbelianSubvariety graph(m, {iv({1, 0, 0, 1})});
  CHECK(degree(graph) == 6);
  // Graph of 1+i: 1 + 2 = 3.
  AbelianSubvariety g2(m, {iv({1, 0, 1, 1})});
  CHECK(degree(g2) == 9);
  CHECK(degree(AbelianSubvariety::full(m)) == 18);
  KernelMorphism km = kernel_morphism(graph);
  REQUIRE(km.rows.size() == 1);
  // phi(P1, P2) = u1 P1 + u2 P2 vanishes on (P, iP): u1 + u2 i = 0.
  EndElem u1 = km.rows[0][0], u2 = km.rows[0][1];
  CHECK(u1.a - u2.b == 0);
  CHECK(u1.b + u2.a == 0);
  // Z[i]-lines of E^2 with degree <= 9: 1, i-graph classes.
  auto res = enumerate_subvarieties(e, 9);
  std::set<std::string> keys;
  for (auto& b : res.items) keys.insert(b.key());
  CHECK(keys.count(diag.key()) == 1);
  CHECK(keys.count(graph.key()) == 1);
  CHECK(keys.count(g2.key()) == 1);
  // Brute-force oracle: primitive (u1, u2) in Z[i]^2 up to units, degree 3(|u1|^2+|u2|^2).
  std::set<std::string> oracle;
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      for (long c = -3; c <= 3; ++c)
        for (long d = -3; d <= 3; ++d) {
          long nrm = a * a + b * b + c * c + d * d;
          if (nrm == 0 || 3 * nrm > 9) continue;
          AbelianSubvariety x(m, {iv({a, b, c, d})});
          if (degree(x) <= 9) oracle.insert(x.key());
        }
  CHECK(keys == oracle);
}

TEST_CASE("torsion cosets") {
  CurveSpec e(-1, 1, 2);
  EndModule m(e);
  AbelianSubvariety diag(m, {iv({1, 1})});
  RatVec zero(4, 0);
  TorsionCoset c0 = make_coset(diag, zero);
  CHECK(c0.order == 1);
  TorsionCoset c1 = make_coset(diag, {mpq_class(1, 2), 0, mpq_class(1, 2), 0});
  CHECK(c1.zeta == c0.zeta);
  TorsionCoset c2 = make_coset(diag, {mpq_class(1, 2), 0, 0, 0});
  CHECK(c2.order == 2);
  CHECK(coset_contains_torsion(c2, {0, 0, mpq_class(1, 2), 0}));
  CHECK_FALSE(coset_contains_torsion(c2, {0, mpq_class(1, 2), 0, 0}));
  auto cos = enumerate_torsion_cosets(e, 6, 2);
  CHECK(cos.complete);
  // Four lines of degree <= 6, each with E/(line) having four 2-torsion classes.
  CHECK(cos.items.size() == 16);
  auto cos3 = enumerate_torsion_cosets(e, 3, 3);
  // Two coordinate lines; classes of order 1, 2, 3 number 1 + 3 + 8.
  CHECK(cos3.items.size() == 24);
}
