#include "tat/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "tat/errors.hpp"
#include "tat/heights.hpp"

namespace tat {

std::string to_string(Certification c) { return c == Certification::exact ? "exact" : "numeric"; }

std::string to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::point: return "point";
    case ComponentKind::translate: return "translate";
    case ComponentKind::full_coset: return "full_coset";
    case ComponentKind::curve_union: return "curve_union";
  }
  return "?";
}

std::string to_string(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::passes: return "passes";
    case BoundVerdict::fails: return "fails";
    case BoundVerdict::not_applicable: return "not_applicable";
  }
  return "?";
}

namespace {

using Cd = Complex<double>;
using Cr = Complex<Real>;

constexpr double kResidualTol = 1e-11;
constexpr double kZeroTol = 1e-9;
constexpr double kMemberTol = 1e-6;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Frame {
  IntMat Wi;
  int k = 0;
};

/// A line in a coset: all parameters but one fixed.
struct Line {
  const TorsionCoset* coset = nullptr;
  std::vector<Cd> fixed;
  int free = 0;
};

std::string format_real(const Real& x) { return x.str(20, std::ios_base::scientific); }

std::string format_complex(const Cr& z) {
  Real scale = 1 + abs(z.real());
  if (abs(z.imag()) <= scale * Real(1e-30)) return format_real(z.real());
  std::string im = format_real(z.imag());
  if (im[0] != '-') im = "+" + im;
  return format_real(z.real()) + im + "*i";
}

long end_norm(const EndElem& e, const std::optional<CmOrder>& cm) {
  long a = e.a.get_si(), b = e.b.get_si();
  if (!cm) return a * a;
  return a * a + cm->trace * a * b + cm->norm * b * b;
}

}  // namespace

struct ScanContext::Impl {
  VarietyModel v;
  CurveSpec curve;
  CosetEnumeration cosets;
  int max_order;
  int bits;
  std::uint64_t seed;
  PeriodLattice lat;
  std::unique_ptr<VarietyEvaluator<double>> evd;
  std::unique_ptr<VarietyEvaluator<Real>> evr;
  std::vector<AbelianSubvariety> bases;
  mutable std::map<std::string, Frame> frames;
  mutable std::optional<std::optional<CurvePoint>> G;

  Impl(const VarietyModel& v_, const CurveSpec& c, const CosetEnumeration& cs, int mo, int b, std::uint64_t s)
      : v(v_), curve(c), cosets(cs), max_order(mo), bits(b), seed(s), lat(compute_periods(c, b)) {
    PrecisionGuard guard(bits);
    evd = std::make_unique<VarietyEvaluator<double>>(v, curve, lat);
    evr = std::make_unique<VarietyEvaluator<Real>>(v, curve, lat);
    std::map<std::string, bool> seen;
    for (const auto& t : cosets.items)
      if (seen.emplace(t.base.key(), true).second) bases.push_back(t.base);
  }

  const WeierstrassModel<double>& md() const { return evd->model(); }
  const WeierstrassModel<Real>& mr() const { return evr->model(); }

  Cd embed_d(const EndElem& e) const {
    Cd r(e.a.get_d(), 0);
    if (curve.cm()) r += e.b.get_d() * curve.cm()->embed<double>();
    return r;
  }
  Cr embed_r(const EndElem& e) const {
    Cr r(Real(e.a.get_mpz_t()), Real(0));
    if (curve.cm()) r += Cr(Real(e.b.get_mpz_t())) * curve.cm()->embed<Real>();
    return r;
  }

  Cd zeta_d(const TorsionCoset& c, int i) const {
    return md().from_coords(c.zeta[2 * i].get_d(), c.zeta[2 * i + 1].get_d());
  }
  Cr zeta_r(const TorsionCoset& c, int i) const {
    return lat.period(c.zeta[2 * i], c.zeta[2 * i + 1]);
  }

  std::vector<double> pcoords(const std::vector<Cd>& z) const {
    std::vector<double> u;
    for (const auto& zi : z) {
      auto [s, t] = md().coords(zi);
      u.push_back(s);
      u.push_back(t);
    }
    return u;
  }

  const Frame& frame(const AbelianSubvariety& b) const {
    auto it = frames.find(b.key());
    if (it != frames.end()) return it->second;
    Frame f;
    IntMat P = period_sublattice(b);
    f.k = static_cast<int>(P.size());
    f.Wi = unimodular_inverse(complete_to_unimodular(P, 2 * b.N()));
    return frames.emplace(b.key(), std::move(f)).first->second;
  }

  bool in_frame(const std::vector<double>& u, const Frame& f) const {
    int n = static_cast<int>(u.size());
    for (int j = f.k; j < n; ++j) {
      double c = 0;
      for (int i = 0; i < n; ++i) c += u[i] * f.Wi[i][j].get_d();
      if (std::fabs(c - std::round(c)) > kMemberTol) return false;
    }
    return true;
  }

  bool on_coset(const std::vector<Cd>& z, const TorsionCoset& c) const {
    auto u = pcoords(z);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= c.zeta[i].get_d();
    return in_frame(u, frame(c.base));
  }

  bool on_translate(const std::vector<Cd>& z, const TranslateStructure& t) const {
    auto u = pcoords(z);
    auto a = pcoords(t.anchor);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= a[i];
    return in_frame(u, frame(t.H));
  }

  bool same_point(const std::vector<Cd>& z1, const std::vector<Cd>& z2) const {
    auto u = pcoords(z1);
    auto w = pcoords(z2);
    for (std::size_t i = 0; i < u.size(); ++i) {
      double d = u[i] - w[i];
      if (std::fabs(d - std::round(d)) > kMemberTol) return false;
    }
    return true;
  }

  std::vector<std::vector<EndElem>> directions(const AbelianSubvariety& b) const { return b.basis(); }

  AffineParam<double> coset_param(const TorsionCoset& c) const {
    int N = c.base.N();
    auto dirs = directions(c.base);
    AffineParam<double> p;
    p.beta.assign(N, std::vector<Cd>(dirs.size()));
    p.base.resize(N);
    for (int i = 0; i < N; ++i) {
      p.base[i] = zeta_d(c, i);
      for (std::size_t k = 0; k < dirs.size(); ++k) p.beta[i][k] = embed_d(dirs[k][i]);
    }
    return p;
  }

  AffineParam<double> line_param_d(const Line& L) const {
    AffineParam<double> full = coset_param(*L.coset);
    AffineParam<double> p;
    int N = static_cast<int>(full.base.size());
    p.base = full.base;
    p.beta.assign(N, std::vector<Cd>(1));
    for (int i = 0; i < N; ++i) {
      for (int k = 0; k < full.g(); ++k)
        if (k != L.free) p.base[i] += full.beta[i][k] * L.fixed[k];
      p.beta[i][0] = full.beta[i][L.free];
    }
    return p;
  }

  AffineParam<Real> line_param_r(const Line& L) const {
    int N = L.coset->base.N();
    auto dirs = directions(L.coset->base);
    AffineParam<Real> p;
    p.base.resize(N);
    p.beta.assign(N, std::vector<Cr>(1));
    for (int i = 0; i < N; ++i) {
      p.base[i] = zeta_r(*L.coset, i);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        if (static_cast<int>(k) == L.free) continue;
        p.base[i] += embed_r(dirs[k][i]) * Cr(Real(L.fixed[k].real()), Real(L.fixed[k].imag()));
      }
      p.beta[i][0] = embed_r(dirs[L.free][i]);
    }
    return p;
  }

  /// g minus the rank of the Jacobian along the coset at z.
  int local_dim(const std::vector<Cd>& z, const TorsionCoset& c) const {
    AffineParam<double> p = coset_param(c);
    p.base = z;
    auto s = newton_solve(*evd, p, std::vector<Cd>(p.g(), Cd(0)), kMemberTol, 0);
    if (!s) return -1;
    return p.g() - s->rank;
  }

  double residual_at(const std::vector<Cd>& z) const {
    auto val = evd->eval(z);
    if (!val) return -1;
    double r = 0;
    for (int j = 0; j < 2; ++j) r = std::max(r, std::abs(val->f[j]) / std::max(val->scale[j], 1e-300));
    return r;
  }

  Cd random_t(SeededUniform& rng) const { return md().from_coords(rng.next(), rng.next()); }

  WitnessPoint witness_from_real(const std::vector<Cr>& z, double radius) const {
    PrecisionGuard guard(bits);
    WitnessPoint w;
    w.radius = radius;
    for (const auto& zi : z) {
      w.z.push_back(Cd(to_double(zi.real()), to_double(zi.imag())));
      if (mr().lattice_distance(zi) < pow(Real(2), -bits / 2)) {
        w.coords.push_back("inf");
        w.coords.push_back("inf");
        continue;
      }
      auto [x, y] = mr().xy(zi);
      w.coords.push_back(format_complex(x));
      w.coords.push_back(format_complex(y));
    }
    w.exact = recognise(z);
    return w;
  }

  /// Refines a solution on a line at the scan precision.
  WitnessPoint refine(const Line& L, const Cd& t) const {
    PrecisionGuard guard(bits);
    AffineParam<Real> p = line_param_r(L);
    double tol = std::ldexp(1.0, -bits + 24);
    auto s = newton_solve(*evr, p, {Cr(Real(t.real()), Real(t.imag()))}, tol, 60);
    if (s) return witness_from_real(s->z, std::max(s->last_step, std::ldexp(1.0, -bits + 16)));
    std::vector<Cr> z = p.at({Cr(Real(t.real()), Real(t.imag()))});
    return witness_from_real(z, 1e-10);
  }

  /// Rational point with elliptic logarithm z, when recognisable.
  std::optional<CurvePoint> recognise_factor(const Cr& z) const {
    if (mr().lattice_distance(z) < pow(Real(2), -bits / 2)) return CurvePoint::identity();
    auto [x, y] = mr().xy(z);
    Real tiny = pow(Real(2), -bits / 2);
    if (abs(x.imag()) > tiny * (1 + abs(x.real())) || abs(y.imag()) > tiny * (1 + abs(y.real()))) return std::nullopt;
    mpz_class max_den;
    mpz_ui_pow_ui(max_den.get_mpz_t(), 2, bits / 4);
    Real tol = pow(Real(2), -(bits * 3) / 5);
    auto qx = recognize_rational(x.real(), max_den, tol * (1 + abs(x.real())));
    auto qy = recognize_rational(y.real(), max_den, tol * (1 + abs(y.real())));
    if (!qx || !qy) return std::nullopt;
    CurvePoint p{QuadElem(*qx), QuadElem(*qy)};
    if (!on_curve(p, curve)) return std::nullopt;
    return p;
  }

  std::optional<AmbientPoint> recognise(const std::vector<Cr>& z) const {
    AmbientPoint p;
    for (const auto& zi : z) {
      auto f = recognise_factor(zi);
      if (!f) return std::nullopt;
      p.factors.push_back(*f);
    }
    return p;
  }

  bool vanishes_exactly(const AmbientPoint& p) const {
    std::vector<QuadElem> c;
    for (const auto& f : p.factors) {
      if (f.is_identity) return false;
      c.push_back(f.x);
      c.push_back(f.y);
    }
    for (const auto& f : v.equations)
      if (!f.eval<QuadElem>(std::span<const QuadElem>(c)).is_zero()) return false;
    return true;
  }

  const std::optional<CurvePoint>& generator() const {
    if (!G) {
      G.emplace();
      CurveSpec e1 = curve.with_power(1);
      for (const auto& q : search_rational_points(e1, 200, 6))
        if (exact_order(q, e1, 12) == 0) {
          G->emplace(q);
          break;
        }
    }
    return *G;
  }

  /// Exact proof that p + h(E) lies in V: the restriction of each equation
  /// has at most D poles, so D + 1 rational zeros force it to vanish.
  bool translate_in_V_exactly(const std::vector<EndElem>& h, const AmbientPoint& p) const {
    const auto& G0 = generator();
    if (!G0) return false;
    int N = v.N;
    long D = 0;
    for (const auto& f : v.equations) {
      auto w = pole_weights(f, curve);
      long d = 0;
      for (int i = 0; i < N; ++i) {
        if (h[i] == EndElem(0) && p.factors[i].is_identity) return false;
        d += w[i] * end_norm(h[i], curve.cm());
      }
      D = std::max(D, d);
    }
    CurveSpec e1 = curve.with_power(1);
    long good = 0;
    CurvePoint Pk = CurvePoint::identity();
    for (long k = 1; k <= D + 40 && good <= D; ++k) {
      Pk = group_add(Pk, *G0, e1);
      AmbientPoint q;
      bool at_infinity = false;
      for (int i = 0; i < N; ++i) {
        CurvePoint c = h[i] == EndElem(0) ? p.factors[i]
                                          : group_add(p.factors[i], scalar_mul(h[i], Pk, e1, bits), e1);
        if (c.is_identity) at_infinity = true;
        q.factors.push_back(c);
      }
      if (at_infinity) continue;
      if (!vanishes_exactly(q)) return false;
      ++good;
    }
    return good > D;
  }
};

ScanContext::ScanContext(const VarietyModel& v, const CurveSpec& curve, const CosetEnumeration& cosets, int max_order,
                         int precision_bits, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(v, curve, cosets, max_order, precision_bits, seed)) {
  if (precision_bits < 64) throw DomainError("precision must be at least 64 bits");
  if (v.N != curve.N()) throw DomainError("variety and curve live in different powers");
}
ScanContext::~ScanContext() = default;
const VarietyModel& ScanContext::variety() const { return impl_->v; }
const CurveSpec& ScanContext::curve() const { return impl_->curve; }
const CosetEnumeration& ScanContext::cosets() const { return impl_->cosets; }
int ScanContext::max_order() const { return impl_->max_order; }

bool ScanContext::contains(const IntersectionComponent& big, const IntersectionComponent& small) const {
  const Impl& I = *impl_;
  for (const auto& w : small.witnesses) {
    bool in = false;
    switch (big.kind) {
      case ComponentKind::point:
        in = I.same_point(big.witnesses.front().z, w.z);
        break;
      case ComponentKind::translate:
        in = I.on_translate(w.z, *big.translate_structure);
        break;
      case ComponentKind::full_coset:
        in = I.on_coset(w.z, big.coset);
        break;
      case ComponentKind::curve_union:
        in = I.on_coset(w.z, big.coset) && I.local_dim(w.z, big.coset) >= big.est_dim;
        break;
    }
    if (!in) return false;
  }
  return true;
}

namespace {

std::vector<IntersectionComponent> torsion_point_component(const ScanContext::Impl& I, const TorsionCoset& coset) {
  int N = coset.base.N();
  std::vector<Cd> z(N);
  for (int i = 0; i < N; ++i) z[i] = I.zeta_d(coset, i);
  double r = I.residual_at(z);
  if (r < 0 || r > kZeroTol) return {};
  PrecisionGuard guard(I.bits);
  std::vector<Cr> zr(N);
  for (int i = 0; i < N; ++i) zr[i] = I.zeta_r(coset, i);
  auto val = I.evr->eval(zr);
  if (!val) return {};
  Real tol = pow(Real(2), -I.bits / 2);
  for (int j = 0; j < 2; ++j)
    if (abs(val->f[j]) > tol * (1 + val->scale[j])) return {};
  IntersectionComponent c(coset);
  c.kind = ComponentKind::point;
  c.est_dim = 0;
  c.witnesses.push_back(I.witness_from_real(zr, std::ldexp(1.0, -I.bits + 16)));
  if (c.witnesses[0].exact && I.vanishes_exactly(*c.witnesses[0].exact)) c.certification = Certification::exact;
  return {c};
}

/// Points of V on a 1-dimensional coset (or a line in a larger one).
std::vector<std::pair<Cd, std::vector<Cd>>> solve_line(const ScanContext::Impl& I, const Line& L, SeededUniform& rng,
                                                         int grid) {
  AffineParam<double> p = I.line_param_d(L);
  std::vector<std::pair<Cd, std::vector<Cd>>> out;
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      Cd t0 = I.md().from_coords((a + rng.next()) / grid, (b + rng.next()) / grid);
      auto s = newton_solve(*I.evd, p, {t0}, kResidualTol);
      if (!s) continue;
      bool dup = false;
      for (const auto& o : out)
        if (I.same_point(o.second, s->z)) dup = true;
      if (!dup) out.emplace_back(s->t[0], s->z);
    }
  return out;
}

bool vanishes_along(const ScanContext::Impl& I, const std::vector<Cd>& z, const AbelianSubvariety& H,
                    SeededUniform& rng) {
  auto dirs = I.directions(H);
  int hits = 0;
  for (int trial = 0; trial < 12 && hits < 4; ++trial) {
    std::vector<Cd> w = z;
    for (const auto& d : dirs) {
      Cd t = I.random_t(rng);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += I.embed_d(d[i]) * t;
    }
    double r = I.residual_at(w);
    if (r < 0) continue;
    if (r > kZeroTol) return false;
    ++hits;
  }
  return hits >= 4;
}

/// Recognises p with p_i = O for a unit entry of h, then proves H + p in V.
void recognise_translate(const ScanContext::Impl& I, IntersectionComponent& c, const std::vector<Cr>& anchor) {
  auto& ts = *c.translate_structure;
  if (ts.H.dim() != 1) return;
  auto h = I.directions(ts.H)[0];
  PrecisionGuard guard(I.bits);
  int N = static_cast<int>(h.size());
  for (int i = 0; i < N; ++i) {
    if (!(h[i].b == 0 && (h[i].a == 1 || h[i].a == -1))) continue;
    Cr t = anchor[i] * Cr(Real(h[i].a.get_mpz_t()));
    std::vector<Cr> pz(N);
    for (int j = 0; j < N; ++j) pz[j] = anchor[j] - I.embed_r(h[j]) * t;
    auto p = I.recognise(pz);
    if (!p) continue;
    if (I.translate_in_V_exactly(h, *p)) {
      ts.p = *p;
      c.certification = Certification::exact;
      return;
    }
  }
}

}  // namespace

std::vector<IntersectionComponent> pullback_intersection(const ScanContext& ctx, const TorsionCoset& coset) {
  const auto& I = ctx.impl();
  int g = coset.dim();
  if (g > 3) throw DomainError("pullback_intersection needs a coset of dimension at most 3");
  if (g == 0) return torsion_point_component(I, coset);
  SeededUniform rng(I.seed ^ fnv1a(coset.key()));
  AffineParam<double> full = I.coset_param(coset);
  int N = coset.base.N();

  // Is the whole coset inside V?
  int zero_hits = 0;
  bool nonzero = false;
  std::vector<std::vector<Cd>> samples;
  for (int trial = 0; trial < 16 && zero_hits < 6 && !nonzero; ++trial) {
    std::vector<Cd> t(g);
    for (auto& x : t) x = I.random_t(rng);
    std::vector<Cd> z = full.at(t);
    double r = I.residual_at(z);
    if (r < 0) continue;
    if (r > kZeroTol)
      nonzero = true;
    else {
      ++zero_hits;
      samples.push_back(t);
    }
  }
  if (!nonzero && zero_hits >= 6) {
    IntersectionComponent c(coset);
    c.kind = ComponentKind::full_coset;
    c.est_dim = g;
    PrecisionGuard guard(I.bits);
    auto dirs = I.directions(coset.base);
    for (int s = 0; s < 3; ++s) {
      std::vector<Cr> z(N);
      for (int i = 0; i < N; ++i) {
        z[i] = I.zeta_r(coset, i);
        for (int k = 0; k < g; ++k)
          z[i] += I.embed_r(dirs[k][i]) * Cr(Real(samples[s][k].real()), Real(samples[s][k].imag()));
      }
      c.witnesses.push_back(I.witness_from_real(z, std::ldexp(1.0, -52)));
    }
    if (g == 1) {
      std::vector<Cr> zt(N);
      for (int i = 0; i < N; ++i) zt[i] = I.zeta_r(coset, i);
      auto p = I.recognise(zt);
      if (p && I.translate_in_V_exactly(dirs[0], *p)) c.certification = Certification::exact;
    }
    return {c};
  }

  std::vector<IntersectionComponent> out;
  if (g == 1) {
    Line L{&coset, {Cd(0)}, 0};
    for (const auto& [t, z] : solve_line(I, L, rng, 6)) {
      IntersectionComponent c(coset);
      c.kind = ComponentKind::point;
      c.est_dim = 0;
      c.witnesses.push_back(I.refine(L, t));
      out.push_back(std::move(c));
    }
    return out;
  }

  // Components of dimension g - 1, met by random lines in the coset.
  struct Hit {
    Line line;
    Cd t;
    std::vector<Cd> z;
  };
  std::vector<Hit> hits;
  for (int free = 0; free < g; ++free)
    for (int rep = 0; rep < 2; ++rep) {
      Line L{&coset, std::vector<Cd>(g), free};
      for (auto& x : L.fixed) x = I.random_t(rng);
      for (const auto& [t, z] : solve_line(I, L, rng, 5)) {
        if (I.local_dim(z, coset) < g - 1) continue;
        bool dup = false;
        for (const auto& h : hits)
          if (I.same_point(h.z, z)) dup = true;
        if (!dup) hits.push_back({L, t, z});
      }
    }
  std::vector<bool> used(hits.size(), false);
  std::vector<AbelianSubvariety> candidates;
  for (const auto& b : I.bases)
    if (b.dim() == g - 1 && coset.base.contains(b)) candidates.push_back(b);
  for (std::size_t a = 0; a < hits.size(); ++a) {
    if (used[a]) continue;
    for (const auto& H : candidates) {
      if (!vanishes_along(I, hits[a].z, H, rng)) continue;
      IntersectionComponent c(coset);
      c.kind = ComponentKind::translate;
      c.est_dim = g - 1;
      WitnessPoint anchor = I.refine(hits[a].line, hits[a].t);
      TranslateStructure ts{H, anchor.z, std::nullopt};
      c.translate_structure = ts;
      for (std::size_t b = a; b < hits.size(); ++b) {
        if (used[b] || !I.on_translate(hits[b].z, ts)) continue;
        used[b] = true;
        c.witnesses.push_back(b == a ? anchor : I.refine(hits[b].line, hits[b].t));
      }
      // Recompute the anchor at full precision for recognition.
      PrecisionGuard guard(I.bits);
      AffineParam<Real> pr = I.line_param_r(hits[a].line);
      auto s = newton_solve(*I.evr, pr, {Cr(Real(hits[a].t.real()), Real(hits[a].t.imag()))},
                            std::ldexp(1.0, -I.bits + 24), 60);
      if (s) {
        auto dirs = I.directions(H);
        for (int extra = 0; extra < 2; ++extra) {
          std::vector<Cr> z = s->z;
          for (const auto& d : dirs) {
            Cd t = I.random_t(rng);
            for (int i = 0; i < N; ++i) z[i] += I.embed_r(d[i]) * Cr(Real(t.real()), Real(t.imag()));
          }
          c.witnesses.push_back(I.witness_from_real(z, anchor.radius));
        }
        recognise_translate(I, c, s->z);
      }
      out.push_back(std::move(c));
      break;
    }
  }
  IntersectionComponent rest(coset);
  rest.kind = ComponentKind::curve_union;
  rest.est_dim = g - 1;
  for (std::size_t a = 0; a < hits.size(); ++a)
    if (!used[a] && rest.witnesses.size() < 8) rest.witnesses.push_back(I.refine(hits[a].line, hits[a].t));
  if (!rest.witnesses.empty()) out.push_back(std::move(rest));
  return out;
}

AnomalyRecord classify(const ScanContext& ctx, const IntersectionComponent& component) {
  const auto& I = ctx.impl();
  AnomalyRecord r(component);
  int N = component.coset.base.N();
  if (component.est_dim == 0) {
    auto u = I.pcoords(component.witnesses.front().z);
    for (int n = 1; n <= I.max_order && !r.resolved; ++n) {
      bool ok = true;
      RatVec zeta(2 * N);
      for (int i = 0; i < 2 * N; ++i) {
        double v = n * u[i];
        if (std::fabs(v - std::round(v)) > kMemberTol) ok = false;
        long m = ((static_cast<long>(std::llround(v)) % n) + n) % n;
        zeta[i] = mpq_class(m, n);
        zeta[i].canonicalize();
      }
      if (ok) {
        r.minimal_B = make_coset(AbelianSubvariety::zero(EndModule(I.curve)), zeta);
        r.resolved = true;
      }
    }
  }
  if (!r.resolved) {
    const TorsionCoset* best = nullptr;
    for (const auto& c : I.cosets.items) {
      if (c.dim() < component.est_dim) continue;
      if (best && c.dim() >= best->dim()) continue;
      bool all = true;
      for (const auto& w : component.witnesses)
        if (!I.on_coset(w.z, c)) {
          all = false;
          break;
        }
      if (all) best = &c;
    }
    if (best) {
      r.minimal_B = *best;
      r.resolved = true;
    } else if (component.coset.dim() >= component.est_dim) {
      r.minimal_B = component.coset;
      r.resolved = true;
    }
  }
  if (!r.resolved) return r;
  r.relative_codim = r.minimal_B->dim() - component.est_dim;
  // codim Y < codim V + codim B with codim V = 2.
  r.anomalous = (N - component.est_dim) < 2 + (N - r.minimal_B->dim());
  if (!r.anomalous)
    r.type = 0;
  else if (r.relative_codim == 0)
    r.type = 1;
  else if (component.est_dim == 0)
    r.type = 3;
  else if (component.kind == ComponentKind::translate)
    r.type = 4;
  else
    r.type = 2;
  return r;
}

std::vector<AnomalyRecord> maximality_filter(const ScanContext& ctx, std::vector<AnomalyRecord> records) {
  for (auto& r : records) {
    r.is_maximal = true;
    for (const auto& s : records) {
      if (&s == &r || !s.anomalous || s.component.est_dim <= r.component.est_dim) continue;
      if (ctx.contains(s.component, r.component)) {
        r.is_maximal = false;
        break;
      }
    }
  }
  return records;
}

BoundCheck verify_bound(const AnomalyRecord& record, const BoundReport& report, const ConstantsLedger& ledger,
                        const CurveSpec& curve) {
  BoundCheck b;
  if (record.type != 4) {
    b.note = "bounds are checked for type (4) records only";
    return b;
  }
  const auto& ts = record.component.translate_structure;
  if (!ts || !ts->p) {
    b.note = "the translation point was not recognised over Q";
    return b;
  }
  EssentialMinimumEstimate mu = translate_essential_minimum(ts->H, *ts->p, curve);
  b.hhat_p1 = 0.5 * (mu.lower + mu.upper);
  b.hhat_p1_radius = 0.5 * (mu.upper - mu.lower);
  double up = mu.upper;
  bool height_ok = up <= 0 || std::log(up) <= report.log_hhat_p1_bound;
  b.passes_at_minimal_inputs = up <= 0 || std::log(up) <= std::log(ledger.C);
  b.degree_ok = degree(ts->H) <= report.deg_Y_bound;
  b.verdict = height_ok && b.degree_ok ? BoundVerdict::passes : BoundVerdict::fails;
  if (!b.degree_ok) b.note = "deg H exceeds deg V^(2^dim V); review the record";
  return b;
}

namespace {

std::string record_sort_key(const AnomalyRecord& r) {
  std::string k = std::to_string(r.minimal_B ? r.minimal_B->dim() : 9) + "|" +
                  (r.minimal_B ? r.minimal_B->key() : std::string()) + "|" + std::to_string(r.component.est_dim) +
                  "|" + std::to_string(r.type) + "|";
  if (r.component.translate_structure) k += r.component.translate_structure->H.key();
  k += "|";
  if (!r.component.witnesses.empty())
    for (const auto& c : r.component.witnesses.front().coords) k += c + ",";
  return k;
}

std::pair<int, std::string> component_order_key(const IntersectionComponent& c) {
  return {c.coset.dim(), c.coset.key()};
}

std::vector<TorsionCoset> torsion_point_cosets(const CurveSpec& curve, int max_order, const Budget& budget,
                                         bool& complete) {
  int n2 = 2 * curve.N();
  AbelianSubvariety zero = AbelianSubvariety::zero(EndModule(curve));
  std::vector<TorsionCoset> out;
  std::uint64_t steps = 0;
  for (int n = 2; n <= max_order; ++n) {
    std::vector<long> d(n2, 0);
    while (true) {
      if (++steps > budget.max_steps) {
        complete = false;
        return out;
      }
      long g = n;
      for (long x : d) g = std::gcd(g, x);
      if (g == 1) {
        RatVec zeta(n2);
        for (int i = 0; i < n2; ++i) {
          zeta[i] = mpq_class(d[i], n);
          zeta[i].canonicalize();
        }
        out.push_back(make_coset(zero, zeta));
      }
      int i = 0;
      while (i < n2 && ++d[i] == n) d[i++] = 0;
      if (i == n2) break;
    }
  }
  return out;
}

}  // namespace

ScanResult scan(const VarietyModel& v, const CurveSpec& curve, const ScanOptions& opt, const ConstantsLedger& ledger) {
  if (opt.max_degree < 1 || opt.max_order < 1) throw DomainError("scan bounds must be positive");
  if (ledger.N != curve.N()) throw DomainError("constants ledger is for a different N");
  ScanResult res;
  res.ledger = ledger;
  res.bounds = effective_bounds(ledger, v.deg_V, v.h_V, v.dim_V);
  CosetEnumeration cosets = enumerate_torsion_cosets(curve, opt.max_degree, opt.max_order, opt.budget);
  res.complete = cosets.complete;
  ScanContext ctx(v, curve, cosets, opt.max_order, opt.precision_bits, opt.seed);

  std::vector<IntersectionComponent> comps;
  auto add = [&](std::vector<IntersectionComponent> found) {
    for (auto& c : found) {
      bool dup = false;
      for (auto& o : comps)
        if (o.est_dim == c.est_dim && ctx.contains(o, c) && ctx.contains(c, o)) {
          dup = true;
          if (component_order_key(c) < component_order_key(o)) o = std::move(c);
          break;
        }
      if (!dup) comps.push_back(std::move(c));
    }
  };
  bool tp_complete = true;
  auto points = torsion_point_cosets(curve, opt.max_order, opt.budget, tp_complete);
  res.complete = res.complete && tp_complete;
  std::vector<const TorsionCoset*> work;
  for (const auto& t : points) work.push_back(&t);
  for (const auto& c : cosets.items) work.push_back(&c);
  if (opt.order_seed != 0) std::shuffle(work.begin(), work.end(), std::mt19937_64(opt.order_seed));
  for (const TorsionCoset* c : work) add(pullback_intersection(ctx, *c));
  res.torsion_points_scanned = points.size();
  res.cosets_scanned = cosets.items.size();

  std::vector<AnomalyRecord> records;
  for (const auto& c : comps) {
    AnomalyRecord r = classify(ctx, c);
    if (!r.resolved || r.anomalous) records.push_back(std::move(r));
  }
  records = maximality_filter(ctx, std::move(records));
  for (auto& r : records) r.bound_check = verify_bound(r, res.bounds, ledger, curve);
  std::stable_sort(records.begin(), records.end(),
                   [](const AnomalyRecord& a, const AnomalyRecord& b) { return record_sort_key(a) < record_sort_key(b); });
  res.records = std::move(records);
  return res;
}

}  // namespace tat
