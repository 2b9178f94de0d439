#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tat/bounds.hpp"
#include "tat/errors.hpp"

using namespace tat;

namespace {

BaseConstants base(double c1, double c2, double c3, double c4, double c5) {
  return {{c1, "user"}, {c2, "user"}, {c3, "user"}, {c4, "user"}, {c5, "user"}};
}

QuadElem q(long a) { return QuadElem(a); }

}  // namespace

TEST_CASE("ledger matches an independent recomputation") {
  for (int N = 1; N <= 5; ++N)
    for (double s : {0.5, 1.0, 7.25}) {
      double c1 = 1.5 * s, c2 = 0.25 + s, c3 = 3 * s, c4 = 0.01 * s, c5 = 2 * s;
      ConstantsLedger l = derive_constants(N, base(c1, c2, c3, c4, c5));
      double c6 = 1;
      for (int i = 0; i < N; ++i) c6 *= 2;
      double c7 = c4 * c6 * (N + 1) > 1 ? c4 * c6 * (N + 1) : 1;
      double p3 = 1;
      for (int i = 0; i < N; ++i) p3 *= 3;
      double c9 = c3 * c6 * ((3 * c2 + c1) * (N + 1) + p3 * std::log(2.0) / 2);
      double c10 = c3 * c5 * c6;
      double c7p = 1;
      for (int i = 0; i < N - 1; ++i) c7p *= c7;
      double C = 0.5 * c7p * ((c9 > c10 ? c9 : c10) + c5 * c6 + 3 * c2);
      CHECK(l.c6 == c6);
      CHECK(l.c7 == c7);
      CHECK(l.c8 == c5 * c6);
      CHECK(l.c9 == doctest::Approx(c9).epsilon(1e-15));
      CHECK(l.c10 == c10);
      CHECK(l.C == doctest::Approx(C).epsilon(1e-15));
    }
  CHECK(derive_constants(3, base(1, 1, 1, 1, 1)).c6 == 8);
  CHECK(derive_constants(2, base(1, 1, 1, 0.25, 1)).c7 == 3);
  CHECK(derive_constants(2, base(1, 1, 1, 1, 1)).c10 == 4);
  CHECK_THROWS_AS(derive_constants(2, base(1, 0, 1, 1, 1)), DomainError);
}

TEST_CASE("choice of T and the effective bounds") {
  ConstantsLedger l = derive_constants(2, base(1, 1, 1, 1.0 / 12, 1));
  CHECK(l.c7 == 1);
  CHECK(choose_T(l, 5) == 5);
  ConstantsLedger l1 = derive_constants(1, base(1, 1, 1, 1, 1));
  CHECK(choose_T(l1, 7) == 1);
  ConstantsLedger l3 = derive_constants(3, base(1, 1, 1, 1.0 / 16, 1));
  CHECK(l3.c7 == 2);
  CHECK(choose_T(l3, 3) == 36);

  ConstantsLedger lc = derive_constants(3, base(1, 1, 1, 1, 1));
  lc.C = 1;
  BoundReport r = effective_bounds(lc, 2, 1, 1);
  CHECK(r.h_Y_bound == 144);
  CHECK(r.deg_Y_bound == 4);
  CHECK(std::exp(r.log_h_Y_bound) == doctest::Approx(144));
  ConstantsLedger lz = derive_constants(2, base(1, 1, 1, 1, 1));
  CHECK(effective_bounds(lz, 1, 0, 0).hhat_p1_bound == lz.C);
  CHECK_THROWS_AS(effective_bounds(lz, 1, 0, 1), DomainError);
  double prev = 0;
  for (long d = 1; d <= 6; ++d) {
    BoundReport b = effective_bounds(lz, d, 0.5, 0);
    CHECK(b.hhat_p1_bound >= prev);
    CHECK(effective_bounds(lz, d, 1.5, 0).hhat_p1_bound >= b.hhat_p1_bound);
    prev = b.hhat_p1_bound;
  }
}

TEST_CASE("arithmetic Bezout bound") {
  CHECK(bezout_bound(1, 0, 1, 0, 1) == doctest::Approx(3 * std::log(2.0) / 2));
  CHECK(bezout_bound(3, 1, 2, 0, 2) == doctest::Approx(2 + 27 * std::log(2.0)));
  CHECK(bezout_bound(3, 1.5, 2, 0.7, 3) == bezout_bound(2, 0.7, 3, 1.5, 3));
}

TEST_CASE("approximation search on an axis coset") {
  CurveSpec e(-1, 1, 2);
  EndModule m(e);
  ConstantsLedger l = derive_constants(2, default_base_constants(e));
  AbelianSubvariety axis(m, {IntVec{1, 0}});
  TorsionCoset c = make_coset(axis, RatVec(4, 0));
  CurvePoint P(q(1), q(1));
  AmbientPoint p1{{scalar_mul(mpz_class(3), P, e), CurvePoint::identity()}};
  double hp = neron_tate(p1, e).value;
  for (double T : {1.0, 4.0, 16.0}) {
    ApproximationResult r = approximation_search(p1, c, T, 1, 1, l, e);
    CHECK(r.H.dim() == 1);
    CHECK(r.degree <= mpz_class(l.c3.value * T));
    CHECK(r.meets_bound);
    // Complementary axis: h(H + p1) <= 2 * 3 * (3 hhat(p1) + c1), computed directly.
    double comp = 2 * 3 * (3 * hp + l.c1.value);
    double bound = l.c4.value * std::pow(T, 1.0 - 2.0) * hp + l.c5.value * T;
    CHECK(comp <= bound);
  }
  // Torsion p1: only the c5 T term remains.
  CurveSpec t(0, 1, 2);
  ConstantsLedger lt = derive_constants(2, default_base_constants(t));
  TorsionCoset ct = make_coset(AbelianSubvariety(EndModule(t), {IntVec{1, 0}}), RatVec(4, 0));
  AmbientPoint tors{{CurvePoint(q(2), q(3)), CurvePoint::identity()}};
  ApproximationResult rt = approximation_search(tors, ct, 1.0, 1, 1, lt, t);
  CHECK(rt.height <= lt.c5.value * 1.0);
  // p1 off the coset is rejected.
  AmbientPoint off{{P, P}};
  CHECK_THROWS_AS(approximation_search(off, c, 1.0, 1, 1, l, e), DomainError);
}
