#include "tat/bounds.hpp"

#include <cmath>

#include "tat/errors.hpp"

namespace tat {

BaseConstants default_base_constants(const CurveSpec& curve) {
  int N = curve.N();
  ConversionConstants cc = default_conversion_constants(curve);
  double c3 = std::pow(3.0, N);
  for (int i = 2; i <= N; ++i) c3 *= i;
  BaseConstants b;
  b.c1 = {cc.c1, "default: height comparison bounds"};
  b.c2 = {cc.c2, "default: height comparison bounds"};
  b.c3 = {c3, "default: N! 3^N"};
  b.c4 = {3.0 * (N + 1) * c3, "default: 3(N+1) c3"};
  b.c5 = {(N + 1) * c3 * cc.c1, "default: (N+1) c3 c1"};
  return b;
}

ConstantsLedger derive_constants(int N, const BaseConstants& base) {
  if (N < 1) throw DomainError("N must be positive");
  for (const auto* c : {&base.c1, &base.c2, &base.c3, &base.c4, &base.c5})
    if (!(c->value > 0) || !std::isfinite(c->value)) throw DomainError("base constants must be positive and finite");
  ConstantsLedger l;
  l.N = N;
  l.c1 = base.c1;
  l.c2 = base.c2;
  l.c3 = base.c3;
  l.c4 = base.c4;
  l.c5 = base.c5;
  double c1 = base.c1.value, c2 = base.c2.value, c3 = base.c3.value, c4 = base.c4.value, c5 = base.c5.value;
  l.c6 = std::ldexp(1.0, N);
  l.c7 = std::max(1.0, c4 * l.c6 * (N + 1));
  l.c8 = c5 * l.c6;
  l.c9 = c3 * l.c6 * ((3 * c2 + c1) * (N + 1) + std::pow(3.0, N) * std::log(2.0) / 2);
  l.c10 = c3 * c5 * l.c6;
  l.C = 0.5 * std::pow(l.c7, N - 1) * (std::max(l.c9, l.c10) + l.c8 + 3 * c2);
  return l;
}

double choose_T(const ConstantsLedger& ledger, const mpz_class& deg_V) {
  if (deg_V < 1) throw DomainError("deg V must be at least 1");
  double T = std::pow(ledger.c7, ledger.N - 1) * std::pow(deg_V.get_d(), ledger.N - 1);
  if (!(T >= 1)) throw ConsistencyError("T < 1");
  return T;
}

BoundReport effective_bounds(const ConstantsLedger& ledger, const mpz_class& deg_V, double h_V, int dim_V) {
  int N = ledger.N;
  if (dim_V != N - 2) throw DomainError("the bounds need codim V = 2 (dim V = N - 2)");
  if (deg_V < 1) throw DomainError("deg V must be at least 1");
  if (!(h_V >= 0)) throw DomainError("h(V) must be nonnegative");
  BoundReport r;
  r.deg_V = deg_V;
  r.h_V = h_V;
  r.dim_V = dim_V;
  r.T = choose_T(ledger, deg_V);
  double d = deg_V.get_d();
  double e = std::ldexp(1.0, dim_V);
  r.hhat_p1_bound = ledger.C * (d + h_V) * std::pow(d, N - 1);
  r.h_Y_bound = 3 * ledger.C * (d + h_V) * std::pow(d, e + N - 1);
  r.log_hhat_p1_bound = std::log(ledger.C) + std::log(d + h_V) + (N - 1) * std::log(d);
  r.log_h_Y_bound = std::log(3 * ledger.C) + std::log(d + h_V) + (e + N - 1) * std::log(d);
  mpz_pow_ui(r.deg_Y_bound.get_mpz_t(), deg_V.get_mpz_t(), 1UL << dim_V);
  return r;
}

double bezout_bound(double deg_X, double h_X, double deg_Y, double h_Y, int N) {
  if (!(deg_X > 0) || !(deg_Y > 0)) throw DomainError("degrees must be positive");
  if (h_X < 0 || h_Y < 0) throw DomainError("heights must be nonnegative");
  return deg_X * h_Y + deg_Y * h_X + std::pow(3.0, N) * std::log(2.0) / 2 * deg_X * deg_Y;
}

ApproximationResult approximation_search(const AmbientPoint& p1, const TorsionCoset& coset, double T, int k, int s,
                                         const ConstantsLedger& ledger, const CurveSpec& curve,
                                         const Budget& budget) {
  int N = curve.N();
  if (ledger.N != N) throw DomainError("constants ledger is for a different N");
  if (k < 1 || k < coset.dim()) throw DomainError("k must be at least max(1, dim of the coset)");
  if (s < 1 || s > N) throw DomainError("s must satisfy 1 <= s <= N");
  if (!(T >= 1)) throw DomainError("T must be at least 1");
  if (!point_on_coset(p1, coset, curve)) throw DomainError("p1 does not lie on the coset");
  EndModule m(curve);
  double cap_d = std::floor(ledger.c3.value * T);
  mpz_class cap(cap_d);
  std::vector<AbelianSubvariety> cands;
  bool complete = true;
  if (s == N) {
    cands.push_back(AbelianSubvariety::zero(m));
  } else {
    auto en = enumerate_subvarieties(curve, cap, budget);
    complete = en.complete;
    for (auto& b : en.items)
      if (b.dim() == N - s) cands.push_back(b);
  }
  if (cands.empty()) throw SearchError("no abelian subvariety of codimension " + std::to_string(s) +
                                       " has degree at most c3*T = " + cap.get_str());
  PairingData data = pairing_data(p1, curve);
  double hp = neron_tate(p1, curve).value;
  std::optional<ApproximationResult> best;
  for (const auto& H : cands) {
    mpz_class deg = degree(H);
    double mu = translate_essential_minimum(H, data).upper;
    double h = (1 + H.dim()) * deg.get_d() * (3 * mu + ledger.c1.value);
    bool better = !best || h < best->height || (h == best->height && deg < best->degree);
    if (better) best = ApproximationResult{H, deg, h, mu, 0, false, 0, true};
  }
  ApproximationResult r = *best;
  r.candidates = cands.size();
  r.complete = complete;
  double expo = 1.0 - static_cast<double>(N) / (static_cast<double>(k) * s);
  r.theorem_bound = ledger.c4.value * std::pow(T, expo) * hp + ledger.c5.value * T;
  r.meets_bound = r.height <= r.theorem_bound;
  return r;
}

}  // namespace tat
