#include "tat/variety.hpp"

#include <algorithm>
#include <cmath>

#include "tat/errors.hpp"

namespace tat {

std::string to_string(DegreeSource s) { return s == DegreeSource::user ? "user" : "pole_bound"; }

double SeededUniform::next() {
  // splitmix64
  std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

MultiPoly reduce_mod_curve(const MultiPoly& f, const CurveSpec& curve) {
  int nv = f.nvars();
  MultiPoly out(nv);
  for (const auto& [e, c] : f.terms()) {
    MultiPoly term = MultiPoly::constant(nv, c);
    for (int v = 0; v < nv; ++v) {
      if (e[v] == 0) continue;
      if (v % 2 == 1 && e[v] >= 2) {
        MultiPoly x = MultiPoly::variable(nv, v - 1);
        MultiPoly cubic = x.pow(3) + MultiPoly::constant(nv, mpq_class(curve.A())) * x +
                          MultiPoly::constant(nv, mpq_class(curve.B()));
        term *= cubic.pow(e[v] / 2);
        if (e[v] % 2 == 1) term *= MultiPoly::variable(nv, v);
      } else {
        term *= MultiPoly::variable(nv, v).pow(e[v]);
      }
    }
    out += term;
  }
  return out;
}

std::vector<int> pole_weights(const MultiPoly& f, const CurveSpec& curve) {
  MultiPoly r = reduce_mod_curve(f, curve);
  int N = r.nvars() / 2;
  std::vector<int> w(N, 0);
  for (const auto& [e, c] : r.terms())
    for (int i = 0; i < N; ++i) w[i] = std::max(w[i], 2 * e[2 * i] + 3 * e[2 * i + 1]);
  return w;
}

mpz_class degree_upper_bound(const std::array<MultiPoly, 2>& eqs, const CurveSpec& curve) {
  int N = eqs[0].nvars() / 2;
  if (N < 2) throw DomainError("a codimension-2 subvariety needs N >= 2");
  auto w1 = pole_weights(eqs[0], curve);
  auto w2 = pole_weights(eqs[1], curve);
  mpz_class s = 0;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      if (j != k) s += w1[j] * w2[k];
  mpz_class f = 1;
  for (int i = 2; i <= N - 2; ++i) f *= i;
  mpz_class p3;
  mpz_ui_pow_ui(p3.get_mpz_t(), 3, N - 2);
  return s * f * p3;
}

template <class S>
VarietyEvaluator<S>::VarietyEvaluator(const VarietyModel& v, const CurveSpec& curve, const PeriodLattice& lat)
    : N_(v.N), model_(model_of<S>(lat, curve)), A_(from_mpq<S>(mpq_class(curve.A()))) {
  for (int j = 0; j < 2; ++j) {
    f_[j] = v.equations[j];
    for (int k = 0; k < 2 * N_; ++k) df_[j].push_back(f_[j].derivative(k));
  }
}

template <class S>
std::optional<typename VarietyEvaluator<S>::Value> VarietyEvaluator<S>::eval(const std::vector<C>& z) const {
  S pole_tol;
  if constexpr (std::is_same_v<S, Real>)
    pole_tol = S(1e-30);
  else
    pole_tol = S(1e-7);
  std::vector<C> vals(2 * N_);
  std::vector<C> dx(N_), dy(N_);
  for (int i = 0; i < N_; ++i) {
    if (model_.lattice_distance(z[i]) < pole_tol) return std::nullopt;
    auto [x, y] = model_.xy(z[i]);
    vals[2 * i] = x;
    vals[2 * i + 1] = y;
    dx[i] = C(S(2)) * y;
    dy[i] = C(S(3)) * x * x + C(A_);
  }
  Value out;
  std::span<const C> span(vals);
  for (int j = 0; j < 2; ++j) {
    out.f[j] = f_[j].template eval<C>(span);
    out.scale[j] = f_[j].template magnitude<S>(span);
    out.grad[j].assign(N_, C(0));
    for (int i = 0; i < N_; ++i)
      out.grad[j][i] = df_[j][2 * i].template eval<C>(span) * dx[i] + df_[j][2 * i + 1].template eval<C>(span) * dy[i];
  }
  return out;
}

template <class S>
std::vector<Complex<S>> AffineParam<S>::at(const std::vector<Complex<S>>& t) const {
  std::vector<Complex<S>> z = base;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t k = 0; k < t.size(); ++k) z[i] += beta[i][k] * t[k];
  return z;
}

namespace {

template <class S>
using CMat = std::vector<std::vector<Complex<S>>>;

/// Solves the small dense system M x = b by partial pivoting; false when singular.
template <class S>
bool solve_dense(CMat<S> M, std::vector<Complex<S>> b, std::vector<Complex<S>>& x) {
  int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    if (std::abs(M[piv][c]) == S(0)) return false;
    std::swap(M[c], M[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < n; ++r) {
      Complex<S> f = M[r][c] / M[c][c];
      for (int k = c; k < n; ++k) M[r][k] -= f * M[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, Complex<S>(0));
  for (int r = n - 1; r >= 0; --r) {
    Complex<S> s = b[r];
    for (int k = r + 1; k < n; ++k) s -= M[r][k] * x[k];
    x[r] = s / M[r][r];
  }
  return true;
}

template <class S>
struct Linearised {
  std::array<Complex<S>, 2> r;
  CMat<S> J;
  double residual = 0;
};

template <class S>
std::optional<Linearised<S>> linearise(const VarietyEvaluator<S>& ev, const AffineParam<S>& param,
                                       const std::vector<Complex<S>>& t) {
  auto v = ev.eval(param.at(t));
  if (!v) return std::nullopt;
  int g = param.g();
  Linearised<S> L;
  L.J.assign(2, std::vector<Complex<S>>(g, Complex<S>(0)));
  for (int j = 0; j < 2; ++j) {
    S sc = v->scale[j] > S(0) ? v->scale[j] : S(1);
    L.r[j] = v->f[j] / sc;
    for (int k = 0; k < g; ++k) {
      Complex<S> s(0);
      for (int i = 0; i < ev.N(); ++i) s += v->grad[j][i] * param.beta[i][k];
      L.J[j][k] = s / sc;
    }
    L.residual = std::max(L.residual, to_double(std::abs(L.r[j])));
  }
  return L;
}

template <class S>
int numerical_rank(const CMat<S>& J) {
  int g = J.empty() ? 0 : static_cast<int>(J[0].size());
  if (g == 0) return 0;
  double a = 0, c = 0;
  Complex<double> b(0);
  for (int k = 0; k < g; ++k) {
    Complex<double> u(to_double(J[0][k].real()), to_double(J[0][k].imag()));
    Complex<double> w(to_double(J[1][k].real()), to_double(J[1][k].imag()));
    a += std::norm(u);
    c += std::norm(w);
    b += std::conj(u) * w;
  }
  double tr = a + c;
  double det = std::max(0.0, a * c - std::norm(b));
  double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  double l1 = tr / 2 + disc;
  double l2 = l1 > 0 ? det / l1 : 0;
  const double abs_tol = std::is_same_v<S, Real> ? 1e-24 : 1e-14;
  const double rel_tol = std::is_same_v<S, Real> ? 1e-20 : 1e-12;
  if (l1 <= abs_tol) return 0;
  if (g == 1 || l2 <= rel_tol * l1) return 1;
  return 2;
}

}  // namespace

template <class S>
std::optional<Solution<S>> newton_solve(const VarietyEvaluator<S>& ev, const AffineParam<S>& param,
                                        std::vector<Complex<S>> t, double tol, int max_iter) {
  int g = param.g();
  auto cur = linearise(ev, param, t);
  if (!cur) return std::nullopt;
  S lambda(1e-6);
  double last_step = 0;
  for (int it = 0; it < max_iter && cur->residual > tol; ++it) {
    CMat<S> M(g, std::vector<Complex<S>>(g, Complex<S>(0)));
    std::vector<Complex<S>> rhs(g, Complex<S>(0));
    for (int k = 0; k < g; ++k) {
      for (int l = 0; l < g; ++l)
        for (int j = 0; j < 2; ++j) M[k][l] += std::conj(cur->J[j][k]) * cur->J[j][l];
      for (int j = 0; j < 2; ++j) rhs[k] -= std::conj(cur->J[j][k]) * cur->r[j];
    }
    S diag(0);
    for (int k = 0; k < g; ++k) diag = std::max(diag, S(std::abs(M[k][k])));
    bool accepted = false;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      CMat<S> Md = M;
      for (int k = 0; k < g; ++k) Md[k][k] += Complex<S>(lambda * (diag + S(1e-300)));
      std::vector<Complex<S>> d;
      if (solve_dense(Md, rhs, d)) {
        std::vector<Complex<S>> tn = t;
        for (int k = 0; k < g; ++k) tn[k] += d[k];
        auto nxt = linearise(ev, param, tn);
        if (nxt && nxt->residual < cur->residual) {
          last_step = 0;
          for (int k = 0; k < g; ++k) last_step = std::max(last_step, to_double(std::abs(d[k])));
          t = tn;
          cur = nxt;
          lambda = std::max(lambda / S(10), S(1e-30));
          accepted = true;
          break;
        }
      }
      lambda *= S(8);
    }
    if (!accepted) break;
  }
  if (cur->residual > tol) return std::nullopt;
  Solution<S> s;
  s.t = t;
  s.z = param.at(t);
  s.residual = cur->residual;
  s.rank = numerical_rank(cur->J);
  s.last_step = last_step;
  return s;
}

template class VarietyEvaluator<double>;
template class VarietyEvaluator<Real>;
template struct AffineParam<double>;
template struct AffineParam<Real>;
template std::optional<Solution<double>> newton_solve(const VarietyEvaluator<double>&, const AffineParam<double>&,
                                                      std::vector<Complex<double>>, double, int);
template std::optional<Solution<Real>> newton_solve(const VarietyEvaluator<Real>&, const AffineParam<Real>&,
                                                    std::vector<Complex<Real>>, double, int);

namespace {

bool depends_on(const MultiPoly& f, int group) { return f.group_degree(group) > 0; }

/// A point of V with Jacobian rank 2, found on slices where all factors but
/// two are fixed at random.
bool codimension_two_witness(const VarietyModel& v, const CurveSpec& curve, std::uint64_t seed) {
  PeriodLattice lat = compute_periods(curve, 96);
  VarietyEvaluator<double> ev(v, curve, lat);
  const auto& m = ev.model();
  SeededUniform rng(seed);
  auto random_z = [&] { return m.from_coords(rng.next(), rng.next()); };
  int N = v.N;
  bool found_low_rank = false;
  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b) {
      bool da = depends_on(v.equations[0], a) || depends_on(v.equations[1], a);
      bool db = depends_on(v.equations[0], b) || depends_on(v.equations[1], b);
      if (!da || !db) continue;
      for (int slice = 0; slice < 3; ++slice) {
        AffineParam<double> p;
        p.beta.assign(N, std::vector<Complex<double>>(2, 0.0));
        p.beta[a][0] = 1.0;
        p.beta[b][1] = 1.0;
        p.base.assign(N, 0.0);
        for (int i = 0; i < N; ++i)
          if (i != a && i != b) p.base[i] = random_z();
        for (int start = 0; start < 48; ++start) {
          auto s = newton_solve(ev, p, {random_z(), random_z()}, 1e-12);
          if (!s) continue;
          if (s->rank == 2) return true;
          found_low_rank = true;
        }
      }
    }
  if (found_low_rank) throw DomainError("the equations do not cut codimension 2: Jacobian rank < 2 at every sampled point");
  throw DomainError("no point of V was found; the equations may define the empty set");
}

}  // namespace

VarietyModel make_variety(const std::array<MultiPoly, 2>& eqs, const CurveSpec& curve,
                          const std::optional<mpz_class>& deg_V, double h_V, std::uint64_t seed) {
  int N = curve.N();
  if (N < 2) throw DomainError("a codimension-2 subvariety needs N >= 2");
  for (const auto& f : eqs) {
    if (f.nvars() != 2 * N) throw DomainError("equations must use the variables x1, y1, ..., xN, yN");
    if (f.is_constant()) throw DomainError("equations must be nonconstant");
  }
  if (!(h_V >= 0) || !std::isfinite(h_V)) throw DomainError("h(V) must be a nonnegative real");
  VarietyModel v;
  v.N = N;
  v.equations = {reduce_mod_curve(eqs[0], curve), reduce_mod_curve(eqs[1], curve)};
  for (const auto& f : v.equations)
    if (f.is_zero() || f.is_constant()) throw DomainError("an equation is constant on E^N");
  v.h_V = h_V;
  v.dim_V = N - 2;
  if (deg_V) {
    if (*deg_V < 1) throw DomainError("deg V must be positive");
    v.deg_V = *deg_V;
    v.deg_source = DegreeSource::user;
  } else {
    v.deg_V = degree_upper_bound(v.equations, curve);
    v.deg_source = DegreeSource::pole_bound;
    if (v.deg_V < 1) throw DomainError("the pole bound gives deg V = 0; the equations cannot cut codimension 2");
  }
  codimension_two_witness(v, curve, seed);
  return v;
}

}  // namespace tat
