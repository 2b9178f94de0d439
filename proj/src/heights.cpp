#include "tat/heights.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "tat/analytic.hpp"
#include "tat/errors.hpp"
#include "tat/numeric.hpp"

namespace tat {

std::string to_string(HeightKind k) {
  switch (k) {
    case HeightKind::weil:
      return "weil";
    case HeightKind::normalized:
      return "normalized";
    case HeightKind::neron_tate:
      return "neron_tate";
  }
  return "";
}

std::string to_string(MinimumKind k) { return k == MinimumKind::normalized ? "normalized" : "neron_tate"; }

std::string to_string(MinimumMethod m) {
  switch (m) {
    case MinimumMethod::zhang_from_height:
      return "zhang_from_height";
    case MinimumMethod::philippon_exact:
      return "philippon_exact";
    case MinimumMethod::sampling:
      return "sampling";
  }
  return "";
}

namespace {

double rounding_radius(double v) { return 4e-16 * (1.0 + std::abs(v)); }

mpz_class lcm_den(const std::vector<mpq_class>& xs) {
  mpz_class l = 1;
  for (const auto& x : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

/// Archimedean contribution for integral coordinates A_i + B_i sqrt(d),
/// summed over the embeddings (complex places counted twice).
double arch_sum(const std::vector<mpz_class>& A, const std::vector<mpz_class>& B, long d, bool l2) {
  size_t maxbits = 64;
  for (size_t i = 0; i < A.size(); ++i)
    maxbits = std::max({maxbits, mpz_sizeinbase(A[i].get_mpz_t(), 2), mpz_sizeinbase(B[i].get_mpz_t(), 2)});
  PrecisionGuard guard(static_cast<int>(128 + 2 * maxbits));
  auto place = [&](int s) {
    Real best = 0, sq = 0;
    for (size_t i = 0; i < A.size(); ++i) {
      Real a(A[i].get_mpz_t()), b(B[i].get_mpz_t());
      Real absq;
      if (d > 0) {
        Real v = a + Real(s) * b * sqrt(Real(d));
        absq = v * v;
      } else {
        absq = a * a + Real(-d) * b * b;
      }
      sq += absq;
      if (absq > best) best = absq;
    }
    return to_double(log(l2 ? sq : best) / 2);
  };
  if (d == 0) return place(1);
  if (d > 0) return place(1) + place(-1);
  return 2 * place(1);
}

HeightValue projective_height(const std::vector<QuadElem>& coords, bool l2) {
  if (coords.empty()) throw DomainError("empty projective point");
  long d = 0;
  bool nonzero = false;
  for (const auto& c : coords) {
    if (!c.is_zero()) nonzero = true;
    if (c.d() != 0) {
      if (d != 0 && d != c.d()) throw DomainError("coordinates in different quadratic fields");
      d = c.d();
    }
  }
  if (!nonzero) throw DomainError("projective point with all coordinates zero");
  std::vector<mpq_class> all;
  for (const auto& c : coords) {
    all.push_back(c.a());
    all.push_back(c.b());
  }
  mpz_class L = lcm_den(all);
  std::vector<mpz_class> A, B;
  for (const auto& c : coords) {
    mpq_class a = c.a() * L, b = c.b() * L;
    A.push_back(a.get_num());
    B.push_back(b.get_num());
  }
  HeightValue h;
  h.kind = l2 ? HeightKind::normalized : HeightKind::weil;
  if (d == 0) {
    mpz_class g = 0;
    for (const auto& a : A) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    h.value = arch_sum(A, B, 0, l2) - log_abs(g);
  } else {
    // Norm of the ideal generated by the coordinates, from the Z-span of
    // alpha and alpha*omega in the basis {1, omega} of the ring of integers.
    bool one_mod_four = ((d % 4) + 4) % 4 == 1;
    mpz_class c0 = one_mod_four ? mpz_class((d - 1) / 4) : mpz_class(d);
    mpz_class c1 = one_mod_four ? 1 : 0;
    IntMat rows;
    for (size_t i = 0; i < A.size(); ++i) {
      mpz_class x = one_mod_four ? mpz_class(A[i] - B[i]) : A[i];
      mpz_class y = one_mod_four ? mpz_class(2 * B[i]) : B[i];
      rows.push_back({x, y});
      rows.push_back({y * c0, x + y * c1});
    }
    IntMat hb = hnf_basis(rows, 2);
    if (hb.size() != 2) throw ConsistencyError("ideal generated by nonzero coordinates has rank < 2");
    mpz_class norm = hb[0][0] * hb[1][1];
    h.value = (arch_sum(A, B, d, l2) - log_abs(norm)) / 2;
  }
  if (h.value < 0 && h.value > -1e-12) h.value = 0;
  h.error_radius = rounding_radius(h.value);
  return h;
}

std::vector<QuadElem> affine_coords(const CurvePoint& p) {
  if (p.is_identity) return {QuadElem(0), QuadElem(1), QuadElem(0)};
  return {p.x, p.y, QuadElem(1)};
}

HeightValue sum_heights(const AmbientPoint& p, HeightKind kind, HeightValue (*f)(const CurvePoint&)) {
  HeightValue h;
  h.kind = kind;
  for (const auto& q : p.factors) {
    HeightValue v = f(q);
    h.value += v.value;
    h.error_radius += v.error_radius;
  }
  return h;
}

// ---- Neron-Tate height through the doubling map on x ----

struct DoublingData {
  mpz_class A, B;
  mpz_class res;     // |Res(F(x,1), G(x,1))|
  double phi_min;    // lower bound of log max(|F|,|G|) on the real unit square boundary
  double phi_max;    // upper bound
  double expansion;  // log2 of a Lipschitz-type growth factor per step
};

template <class T>
T eval_F(const T& X, const T& Z, const T& A, const T& B) {
  T X2 = X * X, Z2 = Z * Z;
  return X2 * X2 - 2 * A * X2 * Z2 - 8 * B * X * Z2 * Z + A * A * Z2 * Z2;
}

template <class T>
T eval_G(const T& X, const T& Z, const T& A, const T& B) {
  T Z2 = Z * Z;
  return 4 * (X * X * X * Z + A * X * Z2 * Z + B * Z2 * Z2);
}

DoublingData doubling_data(const CurveSpec& curve) {
  static std::map<std::pair<std::string, std::string>, DoublingData> cache;
  static std::mutex mu;
  auto key = std::make_pair(curve.A().get_str(), curve.B().get_str());
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  DoublingData dd;
  dd.A = curve.A();
  dd.B = curve.B();
  const mpz_class& A = dd.A;
  const mpz_class& B = dd.B;
  UniPoly F({A * A, -8 * B, -2 * A, 0, 1});
  UniPoly G({4 * B, 4 * A, 0, 4});
  dd.res = abs(resultant(F, G));
  if (dd.res == 0) throw ConsistencyError("doubling map degenerate");
  double a = std::abs(A.get_d()), b = std::abs(B.get_d());
  dd.phi_max = std::log(std::max(1 + 2 * a + 8 * b + a * a, 4 * (1 + a + b)));
  // Lipschitz constants of max(|F|,|G|) on the charts (u,1) and (1,v), |u|,|v| <= 1.
  double lip = std::max({4 + 4 * a + 8 * b, 12 + 4 * a, 4 * a + 24 * b + 4 * a * a, 4 * (1 + 3 * a + 4 * b)});
  double Ad = A.get_d(), Bd = B.get_d();
  double lower = 0;
  for (int n = 1024; n <= (1 << 22); n *= 4) {
    double h = 2.0 / n, mn = 1e300;
    for (int i = 0; i <= n; ++i) {
      double u = -1 + i * h;
      double one = 1.0;
      mn = std::min(mn, std::max(std::abs(eval_F(u, one, Ad, Bd)), std::abs(eval_G(u, one, Ad, Bd))));
      mn = std::min(mn, std::max(std::abs(eval_F(one, u, Ad, Bd)), std::abs(eval_G(one, u, Ad, Bd))));
    }
    lower = mn - lip * h / 2;
    if (lower > mn / 2) break;
  }
  if (!(lower > 0)) throw PrecisionError("could not bound the doubling map away from zero");
  dd.phi_min = std::log(lower) - 1e-9;
  dd.expansion = std::max(4.0, std::ceil(std::log2(8 * lip / lower)) + 2);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, dd);
  return dd;
}

std::atomic<int> g_precision_cap{0};

/// hhat_x(x) = lim h(x(2^k P))/4^k for rational x = X/Z; returns (value, radius).
std::pair<double, double> hat_x_rational(const mpq_class& x, const CurveSpec& curve, double target) {
  DoublingData dd = doubling_data(curve);
  double M = std::max(dd.phi_max, std::log(mpz_get_d(dd.res.get_mpz_t())) - dd.phi_min);
  M = std::max(M, 1.0);
  int K = static_cast<int>(std::ceil(std::log(M / (3 * target)) / std::log(4.0))) + 1;
  K = std::max(K, 1);
  int bits = static_cast<int>(std::min(20000.0, 160 + K * dd.expansion));
  int cap = g_precision_cap.load();
  if (cap > 0 && bits > cap)
    throw PrecisionError("canonical height needs " + std::to_string(bits) + " bits, above the cap of " +
                         std::to_string(cap));
  PrecisionGuard guard(bits);
  mpz_class X = x.get_num(), Z = x.get_den();
  mpz_class absX = abs(X);
  double h0 = log_abs(absX > Z ? absX : Z);
  // Exact finite part: track (X, Z) modulo m = res^(K+2).
  mpz_class m;
  mpz_pow_ui(m.get_mpz_t(), dd.res.get_mpz_t(), static_cast<unsigned long>(K + 2));
  mpz_class Xm = X % m, Zm = Z % m;
  // Archimedean part on normalised real coordinates.
  Real u(X.get_mpz_t()), v(Z.get_mpz_t());
  Real Ar(dd.A.get_mpz_t()), Br(dd.B.get_mpz_t());
  {
    Real s = std::max(abs(u), abs(v));
    u /= s;
    v /= s;
  }
  Real sum = h0;
  Real w = 1;
  for (int k = 0; k < K; ++k) {
    Real f = eval_F(u, v, Ar, Br), g = eval_G(u, v, Ar, Br);
    Real s = std::max(abs(f), abs(g));
    Real phi = log(s);
    u = f / s;
    v = g / s;
    mpz_class Fm = eval_F(Xm, Zm, dd.A, dd.B), Gm = eval_G(Xm, Zm, dd.A, dd.B);
    Fm %= m;
    Gm %= m;
    mpz_class gk;
    mpz_gcd(gk.get_mpz_t(), Fm.get_mpz_t(), Gm.get_mpz_t());
    mpz_gcd(gk.get_mpz_t(), gk.get_mpz_t(), m.get_mpz_t());
    m /= gk;
    Xm = (Fm / gk) % m;
    Zm = (Gm / gk) % m;
    w /= 4;
    sum += w * (phi - Real(log_abs(gk)));
  }
  double val = to_double(sum);
  double rad = M / (3 * std::pow(4.0, K)) + rounding_radius(val) + std::ldexp(1.0, -100);
  return {val, rad};
}

std::pair<double, double> hat_rational_point(const CurvePoint& p, const CurveSpec& curve, double target) {
  if (p.is_identity) return {0.0, 0.0};
  auto [v, r] = hat_x_rational(p.x.a(), curve, 2 * target);
  return {std::max(0.0, v / 2), r / 2};
}

}  // namespace

int set_height_precision_cap(int bits) { return g_precision_cap.exchange(bits); }

HeightValue weil_height_projective(const std::vector<QuadElem>& coords) { return projective_height(coords, false); }

HeightValue normalized_height_projective(const std::vector<QuadElem>& coords) {
  return projective_height(coords, true);
}

HeightValue weil_height(const CurvePoint& p) { return projective_height(affine_coords(p), false); }

HeightValue normalized_height_point(const CurvePoint& p) { return projective_height(affine_coords(p), true); }

HeightValue weil_height(const AmbientPoint& p) {
  return sum_heights(p, HeightKind::weil, [](const CurvePoint& q) { return weil_height(q); });
}

HeightValue normalized_height_point(const AmbientPoint& p) {
  return sum_heights(p, HeightKind::normalized, [](const CurvePoint& q) { return normalized_height_point(q); });
}

HeightValue neron_tate(const CurvePoint& p, const CurveSpec& curve, double target_radius) {
  if (!on_curve(p, curve)) throw DomainError("point " + p.to_string() + " is not on the curve");
  if (!(target_radius > 0)) throw DomainError("target radius must be positive");
  HeightValue h;
  h.kind = HeightKind::neron_tate;
  if (p.is_identity) return h;
  if (p.is_rational()) {
    auto [v, r] = hat_rational_point(p, curve, target_radius);
    h.value = v;
    h.error_radius = r;
    return h;
  }
  // 4 hhat(P) = hhat(P + P^s) + hhat(P - P^s); P - P^s lives on the quadratic twist.
  CurvePoint ps(p.x.conj(), p.y.conj());
  CurvePoint sp = group_add(p, ps, curve);
  CurvePoint dp = group_sub(p, ps, curve);
  auto [v1, r1] = hat_rational_point(sp, curve, target_radius);
  double v2 = 0, r2 = 0;
  if (!dp.is_identity) {
    if (!dp.x.is_rational() || dp.y.a() != 0) throw ConsistencyError("P - P^sigma is not anti-invariant");
    long d = p.field();
    mpz_class dz(d);
    CurveSpec twist(curve.A() * dz * dz, curve.B() * dz * dz * dz, 1);
    CurvePoint q(QuadElem(dp.x.a() * d), QuadElem(mpq_class(dp.y.b() * d * d)));
    auto res = hat_rational_point(q, twist, target_radius);
    v2 = res.first;
    r2 = res.second;
  }
  h.value = (v1 + v2) / 4;
  h.error_radius = (r1 + r2) / 4 + rounding_radius(h.value);
  return h;
}

HeightValue neron_tate(const AmbientPoint& p, const CurveSpec& curve, double target_radius) {
  HeightValue h;
  h.kind = HeightKind::neron_tate;
  for (const auto& q : p.factors) {
    HeightValue v = neron_tate(q, curve, target_radius);
    h.value += v.value;
    h.error_radius += v.error_radius;
  }
  return h;
}

PairingValue height_pairing(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve) {
  HeightValue a = neron_tate(group_add(p, q, curve), curve);
  HeightValue b = neron_tate(p, curve);
  HeightValue c = neron_tate(q, curve);
  return {(a.value - b.value - c.value) / 2, (a.error_radius + b.error_radius + c.error_radius) / 2};
}

namespace {

// Bound on |hhat(P) - h(x(P))/2| over all algebraic P.
double silverman_lmax(const CurveSpec& curve) {
  mpq_class j = curve.j_invariant();
  double hj = j == 0 ? 0.0 : std::max(log_abs(j.get_num()), log_abs(j.get_den()));
  double hd = log_abs(curve.discriminant());
  double lower = hj / 8 + hd / 12 + 0.973;
  double upper = hj / 12 + hd / 12 + 1.07;
  return std::max(lower, upper);
}

}  // namespace

ConversionConstants default_conversion_constants(const CurveSpec& curve) {
  double lmax = silverman_lmax(curve);
  double a = std::abs(curve.A().get_d()), b = std::abs(curve.B().get_d());
  double R = std::max({2.0, 2 * std::sqrt(a), 2 * std::cbrt(b)});
  ConversionConstants c;
  c.c1 = curve.N() * (3 * lmax + 0.5 * std::log(3 * (1 + a + b)));
  c.c2 = curve.N() * (lmax + 0.5 * std::log(R));
  c.source = ConversionConstants::Source::default_derived;
  return c;
}

Interval convert_heights(const HeightValue& v, HeightKind target, const ConversionConstants& consts) {
  if (v.kind == HeightKind::weil || target == HeightKind::weil)
    throw DomainError("conversion is defined between normalized and Neron-Tate heights");
  double lo = std::max(0.0, v.value - v.error_radius), hi = v.value + v.error_radius;
  if (v.kind == target) return {lo, hi};
  if (v.kind == HeightKind::neron_tate) return {std::max(0.0, 3 * (lo - consts.c2)), 3 * hi + consts.c1};
  return {std::max(0.0, (lo - consts.c1) / 3), hi / 3 + consts.c2};
}

EssentialMinimumEstimate zhang_interval(double deg_X, double h_X, int dim_X) {
  if (!(deg_X > 0)) throw DomainError("degree must be positive");
  if (h_X < 0) throw DomainError("height must be nonnegative");
  if (dim_X < 0) throw DomainError("dimension must be nonnegative");
  EssentialMinimumEstimate e;
  e.lower = h_X / ((1.0 + dim_X) * deg_X);
  e.upper = h_X / deg_X;
  e.kind = MinimumKind::normalized;
  e.method = MinimumMethod::zhang_from_height;
  return e;
}

namespace {

/// Element a + b*gamma of End(E) tensor Q.
struct KElem {
  mpq_class a{0}, b{0};
};

struct KField {
  long t = 0, n = 0;
  KElem mul(const KElem& x, const KElem& y) const {
    return {x.a * y.a - n * x.b * y.b, x.a * y.b + x.b * y.a + t * x.b * y.b};
  }
  KElem add(const KElem& x, const KElem& y) const { return {x.a + y.a, x.b + y.b}; }
  KElem sub(const KElem& x, const KElem& y) const { return {x.a - y.a, x.b - y.b}; }
  KElem conj(const KElem& x) const { return {x.a + t * x.b, -x.b}; }
  mpq_class norm(const KElem& x) const { return x.a * x.a + t * x.a * x.b + n * x.b * x.b; }
  KElem inv(const KElem& x) const {
    mpq_class nn = norm(x);
    if (nn == 0) throw ConsistencyError("division by zero in End(E) tensor Q");
    KElem c = conj(x);
    return {c.a / nn, c.b / nn};
  }
};

std::vector<std::vector<KElem>> invert(std::vector<std::vector<KElem>> m, const KField& k) {
  size_t n = m.size();
  std::vector<std::vector<KElem>> inv(n, std::vector<KElem>(n));
  for (size_t i = 0; i < n; ++i) inv[i][i].a = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && k.norm(m[p][c]) == 0) ++p;
    if (p == n) throw ConsistencyError("singular Hermitian Gram matrix");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    KElem s = k.inv(m[c][c]);
    for (size_t j = 0; j < n; ++j) {
      m[c][j] = k.mul(s, m[c][j]);
      inv[c][j] = k.mul(s, inv[c][j]);
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      KElem f = m[i][c];
      for (size_t j = 0; j < n; ++j) {
        m[i][j] = k.sub(m[i][j], k.mul(f, m[c][j]));
        inv[i][j] = k.sub(inv[i][j], k.mul(f, inv[c][j]));
      }
    }
  }
  return inv;
}

}  // namespace

PairingData pairing_data(const AmbientPoint& p, const CurveSpec& curve) {
  PairingData d;
  d.N = p.size();
  if (curve.cm()) {
    d.trace = curve.cm()->trace;
    d.norm = curve.cm()->norm;
  }
  int N = d.N;
  d.G.assign(N, std::vector<PairingValue>(N));
  for (int j = 0; j < N; ++j)
    for (int l = j; l < N; ++l) d.G[j][l] = d.G[l][j] = height_pairing(p.factors[j], p.factors[l], curve);
  if (curve.cm()) {
    d.G_gamma.assign(N, std::vector<PairingValue>(N));
    std::vector<CurvePoint> gp;
    for (const auto& q : p.factors) gp.push_back(scalar_mul(EndElem(0, 1), q, curve));
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) d.G_gamma[j][l] = height_pairing(gp[j], p.factors[l], curve);
  }
  return d;
}

EssentialMinimumEstimate translate_essential_minimum(const AbelianSubvariety& H, const AmbientPoint& p,
                                                     const CurveSpec& curve) {
  if (p.size() != H.N()) throw DomainError("point and subvariety live in different powers");
  return translate_essential_minimum(H, pairing_data(p, curve));
}

EssentialMinimumEstimate translate_essential_minimum(const AbelianSubvariety& H, const PairingData& data) {
  int N = H.N();
  if (data.N != N) throw DomainError("point and subvariety live in different powers");
  bool cm = H.module().rank() == 2;
  KField k{data.trace, data.norm};
  // Orthogonal projection onto the complement: I - M (M* M)^{-1} M*.
  auto basis = H.basis();
  size_t g = basis.size();
  std::vector<std::vector<KElem>> M(N, std::vector<KElem>(g));
  for (size_t c = 0; c < g; ++c)
    for (int i = 0; i < N; ++i) M[i][c] = {mpq_class(basis[c][i].a), mpq_class(basis[c][i].b)};
  std::vector<std::vector<KElem>> proj(N, std::vector<KElem>(N));
  for (int i = 0; i < N; ++i) proj[i][i].a = 1;
  if (g > 0) {
    std::vector<std::vector<KElem>> gram(g, std::vector<KElem>(g));
    for (size_t a = 0; a < g; ++a)
      for (size_t b = 0; b < g; ++b)
        for (int i = 0; i < N; ++i) gram[a][b] = k.add(gram[a][b], k.mul(k.conj(M[i][a]), M[i][b]));
    auto gi = invert(gram, k);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (size_t a = 0; a < g; ++a)
          for (size_t b = 0; b < g; ++b)
            proj[i][j] = k.sub(proj[i][j], k.mul(k.mul(M[i][a], gi[a][b]), k.conj(M[j][b])));
  }
  const auto& G = data.G;
  const auto& Gg = cm ? data.G_gamma : data.G;
  // <alpha P_j, beta P_l> = ac G + ad <gamma P_l, P_j> + bc <gamma P_j, P_l> + bd n G.
  double value = 0, radius = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        const KElem& al = proj[i][j];
        const KElem& be = proj[i][l];
        double ac = mpq_class(al.a * be.a + k.n * al.b * be.b).get_d();
        double ad = mpq_class(al.a * be.b).get_d();
        double bc = mpq_class(al.b * be.a).get_d();
        value += ac * G[j][l].value + ad * Gg[l][j].value + bc * Gg[j][l].value;
        radius += std::abs(ac) * G[j][l].error_radius + std::abs(ad) * Gg[l][j].error_radius +
                  std::abs(bc) * Gg[j][l].error_radius;
      }
  radius += rounding_radius(value) * N * N;
  EssentialMinimumEstimate e;
  e.kind = MinimumKind::neron_tate;
  e.method = MinimumMethod::philippon_exact;
  e.lower = std::max(0.0, value - radius);
  e.upper = std::max(0.0, value + radius);
  return e;
}

namespace {

// Whether G divides F in Q[x].
bool divides(const UniPoly& G, const UniPoly& F) {
  std::vector<mpq_class> r(F.coeffs().begin(), F.coeffs().end());
  int dg = G.degree();
  mpq_class lead(G.coeff(dg));
  for (int i = static_cast<int>(r.size()) - 1; i >= dg; --i) {
    if (r[i] == 0) continue;
    mpq_class q = r[i] / lead;
    for (int j = 0; j <= dg; ++j) r[i - dg + j] -= q * G.coeff(j);
  }
  for (int i = 0; i < dg && i < static_cast<int>(r.size()); ++i)
    if (r[i] != 0) return false;
  return true;
}

// lead(F) * prod (x - r) over the subset, when its coefficients round to integers.
std::optional<UniPoly> integral_product(const UniPoly& F, const std::vector<Complex<Real>>& roots,
                                        const std::vector<int>& subset, const Real& tol) {
  std::vector<Complex<Real>> c{Complex<Real>(Real(F.coeffs().back().get_mpz_t()))};
  for (int i : subset) {
    std::vector<Complex<Real>> next(c.size() + 1, Complex<Real>(0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= c[k] * roots[i];
    }
    c = std::move(next);
  }
  std::vector<mpz_class> z;
  for (const auto& v : c) {
    mpz_class r = floor_mpz(v.real() + Real(0.5));
    if (abs(v.imag()) > tol * (1 + abs(v)) || abs(v.real() - Real(r.get_mpz_t())) > tol * (1 + abs(v))) return std::nullopt;
    z.push_back(r);
  }
  UniPoly G(z);
  if (!divides(G, F)) return std::nullopt;
  return G;
}

// Weil heights of the distinct roots of F (all of them given numerically),
// from the irreducible factors of F: the smallest root subset containing a
// root with an integral product dividing F is its minimal polynomial.
std::vector<double> root_heights(const UniPoly& F, const std::vector<Complex<Real>>& roots, const Real& tol) {
  int m = static_cast<int>(roots.size());
  std::vector<double> h(m, -1.0);
  for (int i0 = 0; i0 < m; ++i0) {
    if (h[i0] >= 0) continue;
    std::vector<int> free;
    for (int i = 0; i < m; ++i)
      if (i != i0 && h[i] < 0) free.push_back(i);
    std::optional<UniPoly> found;
    std::vector<int> members;
    for (int size = 0; size <= static_cast<int>(free.size()) && !found; ++size) {
      std::vector<int> pick(size);
      std::iota(pick.begin(), pick.end(), 0);
      while (true) {
        std::vector<int> subset{i0};
        for (int k : pick) subset.push_back(free[k]);
        if ((found = integral_product(F, roots, subset, tol))) {
          members = subset;
          break;
        }
        int k = size - 1;
        while (k >= 0 && pick[k] == static_cast<int>(free.size()) - size + k) --k;
        if (k < 0) break;
        ++pick[k];
        for (int j = k + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    if (!found) throw ConsistencyError("no rational factor contains the root");
    mpz_class content = 0;
    for (const auto& c : found->coeffs()) content = gcd(content, c);
    double logm = log_abs(found->coeffs().back()) - log_abs(content);
    for (int i : members) logm += std::max(0.0, to_double(log(abs(roots[i]))));
    for (int i : members) h[i] = logm / static_cast<double>(members.size());
  }
  return h;
}

}  // namespace

std::vector<HeightValue> neron_tate_torsion(int n, const std::vector<TorsionPoint>& pts, const CurveSpec& curve,
                                            double target_radius) {
  if (!(target_radius > 0)) throw DomainError("target radius must be positive");
  if (!certify_torsion(n, pts, curve)) throw ConsistencyError("torsion points fail certification");
  int bits = 64;
  for (const auto& t : pts)
    if (!t.point.is_identity) bits = static_cast<int>(t.point.x.real().precision() * 3.3219);
  PrecisionGuard guard(bits);
  Real tol = pow(Real(2), -bits / 3);
  const UniPoly polys[2] = {division_polynomial(n, curve), curve.cubic()};
  std::vector<Complex<Real>> roots[2];
  std::vector<std::pair<int, int>> where(pts.size(), {-1, -1});
  std::map<std::pair<mpq_class, mpq_class>, std::size_t> by_label;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const TorsionPoint& t = pts[i];
    by_label[{t.a, t.b}] = i;
    if (t.point.is_identity) continue;
    int w = mpq_class(2 * t.a).get_den() == 1 && mpq_class(2 * t.b).get_den() == 1 ? 1 : 0;
    int idx = -1;
    for (std::size_t k = 0; k < roots[w].size(); ++k)
      if (abs(roots[w][k] - t.point.x) <= tol * (1 + abs(t.point.x))) idx = static_cast<int>(k);
    if (idx < 0) {
      idx = static_cast<int>(roots[w].size());
      roots[w].push_back(t.point.x);
    }
    where[i] = {w, idx};
  }
  std::vector<double> heights[2];
  for (int w = 0; w < 2; ++w)
    if (!roots[w].empty()) heights[w] = root_heights(polys[w], roots[w], tol);
  // hhat(P) = hhat([2^K]P) / 4^K with |hhat(Q) - h(x(Q))/2| <= Lmax, and h(x(O)) = 0.
  double lmax = silverman_lmax(curve);
  int K = 0;
  while (lmax / std::ldexp(1.0, 2 * K) > target_radius) ++K;
  double scale = std::ldexp(1.0, 2 * K);
  mpz_class twoK = mpz_class(1) << K;
  auto reduce = [](const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return mpq_class(q - f);
  };
  std::vector<HeightValue> out;
  for (const auto& t : pts) {
    HeightValue v;
    v.kind = HeightKind::neron_tate;
    if (!t.point.is_identity) {
      auto it = by_label.find({reduce(t.a * twoK), reduce(t.b * twoK)});
      if (it == by_label.end()) throw ConsistencyError("torsion set is not closed under doubling");
      auto [w, idx] = where[it->second];
      double hx = w < 0 ? 0.0 : heights[w][idx];
      v.value = hx / (2 * scale);
      v.error_radius = lmax / scale + rounding_radius(v.value);
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace tat
