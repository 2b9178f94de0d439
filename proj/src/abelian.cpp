#include "tat/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "tat/analytic.hpp"
#include "tat/errors.hpp"

namespace tat {

namespace {

int rank_of(const IntMat& rows, int cols) { return rows.empty() ? 0 : hermite_form(rows, cols).rank; }

bool lex_less(const IntMat& a, const IntMat& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j] != b[i][j]) return a[i][j] < b[i][j];
  return false;
}

mpz_class factorial_pow3(int g) {
  mpz_class f = 1;
  for (int i = 2; i <= g; ++i) f *= i;
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(g));
  return f * p;
}

/// Upper bound for gamma_g^g (Hermite constant), exact for g <= 8.
double minkowski_constant(int g) {
  static const double table[] = {1.0, 1.0, 4.0 / 3.0, 2.0, 4.0, 8.0, 64.0 / 3.0, 64.0, 256.0};
  if (g <= 8) return table[g];
  return std::pow(1.0 + g / 4.0, g);
}

mpq_class frac(const mpq_class& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return q - f;
}

}  // namespace

EndModule::EndModule(const CurveSpec& curve) : N_(curve.N()), r_(curve.end_rank()), cm_(curve.cm()) {
  int n = N_ * r_;
  gram2_.assign(n, IntVec(n, 0));
  for (int i = 0; i < N_; ++i) {
    if (r_ == 1) {
      gram2_[i][i] = 2;
    } else {
      gram2_[2 * i][2 * i] = 2;
      gram2_[2 * i][2 * i + 1] = cm_->trace;
      gram2_[2 * i + 1][2 * i] = cm_->trace;
      gram2_[2 * i + 1][2 * i + 1] = 2 * cm_->norm;
    }
  }
  if (cm_) {
    PeriodLattice lat = compute_periods(curve, 128);
    PrecisionGuard guard(lat.precision_bits);
    Complex<Real> g = cm_->embed<Real>();
    auto coords = [&](const Complex<Real>& z) {
      Complex<Real> w = z / lat.omega1;
      Real t = w.imag() / lat.tau.imag();
      Real s = w.real() - t * lat.tau.real();
      long si = std::lround(to_double(s));
      long ti = std::lround(to_double(t));
      if (std::abs(to_double(s) - si) > 1e-6 || std::abs(to_double(t) - ti) > 1e-6)
        throw ConsistencyError("declared CM order does not preserve the period lattice");
      return std::make_pair(si, ti);
    };
    auto [p, q] = coords(g * lat.omega1);
    auto [r, s] = coords(g * lat.omega2);
    period_action_ = {p, q, r, s};
  }
}

IntVec EndModule::gamma(const IntVec& v) const {
  if (r_ == 1) return v;
  IntVec out(v.size());
  for (int i = 0; i < N_; ++i) {
    const mpz_class& c = v[2 * i];
    const mpz_class& d = v[2 * i + 1];
    out[2 * i] = -cm_->norm * d;
    out[2 * i + 1] = c + cm_->trace * d;
  }
  return out;
}

IntMat EndModule::close(const IntMat& rows) const {
  IntMat out = rows;
  if (r_ == 2)
    for (const auto& v : rows) out.push_back(gamma(v));
  return out;
}

IntVec EndModule::from_end(const std::vector<EndElem>& u) const {
  if (static_cast<int>(u.size()) != N_) throw DomainError("End(E)-vector has the wrong length");
  IntVec v;
  for (const auto& e : u) {
    if (r_ == 1) {
      if (!e.is_integer()) throw DomainError("endomorphism outside Z on a curve without declared CM");
      v.push_back(e.a);
    } else {
      v.push_back(e.a);
      v.push_back(e.b);
    }
  }
  return v;
}

std::vector<EndElem> EndModule::to_end(const IntVec& v) const {
  std::vector<EndElem> u;
  for (int i = 0; i < N_; ++i) u.push_back(r_ == 1 ? EndElem(v[i], 0) : EndElem(v[2 * i], v[2 * i + 1]));
  return u;
}

AbelianSubvariety::AbelianSubvariety(const EndModule& module, const IntMat& generators) : module_(module) {
  for (const auto& g : generators)
    if (static_cast<int>(g.size()) != module.dim()) throw DomainError("generator has the wrong length");
  hnf_ = saturate(module.close(generators), module.dim());
}

AbelianSubvariety AbelianSubvariety::zero(const EndModule& module) { return AbelianSubvariety(module, {}); }

AbelianSubvariety AbelianSubvariety::full(const EndModule& module) {
  return AbelianSubvariety(module, identity_matrix(module.dim()));
}

AbelianSubvariety AbelianSubvariety::from_columns(const EndModule& module,
                                                  const std::vector<std::vector<EndElem>>& columns) {
  IntMat gens;
  for (const auto& c : columns) gens.push_back(module.from_end(c));
  return AbelianSubvariety(module, gens);
}

std::vector<std::vector<EndElem>> AbelianSubvariety::basis() const {
  std::vector<std::vector<EndElem>> out;
  IntMat chosen;
  int cols = module_.dim();
  for (const auto& row : hnf_) {
    IntMat trial = chosen;
    trial.push_back(row);
    if (rank_of(module_.close(trial), cols) > rank_of(module_.close(chosen), cols)) {
      chosen = trial;
      out.push_back(module_.to_end(row));
    }
  }
  return out;
}

bool AbelianSubvariety::contains(const IntVec& v) const {
  IntMat m = hnf_;
  m.push_back(v);
  return rank_of(m, module_.dim()) == static_cast<int>(hnf_.size());
}

bool AbelianSubvariety::contains(const AbelianSubvariety& other) const {
  for (const auto& v : other.hnf_)
    if (!contains(v)) return false;
  return true;
}

mpz_class degree(const AbelianSubvariety& b) {
  int g = b.dim();
  const IntMat& rows = b.canonical_form();
  if (g == 0) return 1;
  mpz_class pre = factorial_pow3(g);
  if (b.module().rank() == 1) return pre * determinant(gram_matrix(rows));
  mpz_class det = determinant(gram_matrix(rows, b.module().gram2()));
  mpz_class dabs = -b.module().cm()->discriminant();
  mpz_class dg;
  mpz_pow_ui(dg.get_mpz_t(), dabs.get_mpz_t(), static_cast<unsigned long>(g));
  if (det % dg != 0) throw ConsistencyError("Hermitian determinant not divisible by |D|^g");
  mpz_class q = det / dg;
  if (!mpz_perfect_square_p(q.get_mpz_t())) throw ConsistencyError("Hermitian determinant is not a square");
  return pre * sqrt(q);
}

AbelianSubvariety orth_complement(const AbelianSubvariety& b) {
  const EndModule& m = b.module();
  if (b.canonical_form().empty()) return AbelianSubvariety::full(m);
  return AbelianSubvariety(m, integer_kernel(multiply(b.canonical_form(), m.gram2()), m.dim()));
}

AbelianSubvariety sum(const AbelianSubvariety& a, const AbelianSubvariety& b) {
  IntMat rows = a.canonical_form();
  rows.insert(rows.end(), b.canonical_form().begin(), b.canonical_form().end());
  return AbelianSubvariety(a.module(), rows);
}

AbelianSubvariety intersect_identity_component(const AbelianSubvariety& a, const AbelianSubvariety& b) {
  int n = a.module().dim();
  IntMat ka = a.canonical_form().empty() ? identity_matrix(n) : integer_kernel(a.canonical_form(), n);
  IntMat kb = b.canonical_form().empty() ? identity_matrix(n) : integer_kernel(b.canonical_form(), n);
  ka.insert(ka.end(), kb.begin(), kb.end());
  if (ka.empty()) return AbelianSubvariety::full(a.module());
  return AbelianSubvariety(a.module(), integer_kernel(ka, n));
}

mpz_class intersection_with_complement_order(const AbelianSubvariety& b) {
  AbelianSubvariety c = orth_complement(b);
  IntMat rows = b.canonical_form();
  rows.insert(rows.end(), c.canonical_form().begin(), c.canonical_form().end());
  mpz_class idx = abs(determinant(rows));
  return b.module().rank() == 1 ? idx * idx : idx;
}

KernelMorphism kernel_morphism(const AbelianSubvariety& b) {
  const EndModule& m = b.module();
  int n = m.dim();
  KernelMorphism km;
  km.r = b.N() - b.dim();
  if (km.r == 0) return km;
  IntMat ker;
  if (m.rank() == 1) {
    ker = b.canonical_form().empty() ? identity_matrix(n) : integer_kernel(b.canonical_form(), n);
    ker = lll_reduce(ker);
    for (const auto& row : ker) km.rows.push_back(m.to_end(row));
    return km;
  }
  // sum_j u_j v_j = 0 in O for each Z-basis vector v of B.
  long t = m.cm()->trace, nn = m.cm()->norm;
  IntMat eqs;
  for (const auto& v : b.canonical_form()) {
    IntVec e1(n), e2(n);
    for (int j = 0; j < b.N(); ++j) {
      const mpz_class& c = v[2 * j];
      const mpz_class& d = v[2 * j + 1];
      e1[2 * j] = c;
      e1[2 * j + 1] = -nn * d;
      e2[2 * j] = d;
      e2[2 * j + 1] = c + t * d;
    }
    eqs.push_back(e1);
    eqs.push_back(e2);
  }
  ker = eqs.empty() ? identity_matrix(n) : integer_kernel(eqs, n);
  ker = lll_reduce(ker, m.gram2());
  IntMat chosen;
  for (const auto& row : ker) {
    IntMat trial = chosen;
    trial.push_back(row);
    if (rank_of(m.close(trial), n) > rank_of(m.close(chosen), n)) {
      chosen = trial;
      km.rows.push_back(m.to_end(row));
    }
  }
  if (static_cast<int>(km.rows.size()) != km.r) throw ConsistencyError("kernel morphism has the wrong rank");
  return km;
}

namespace {

struct ShortVector {
  IntVec v;
  mpq_class norm;  // half of the gram2 form, at least 1 for nonzero vectors
};

/// Nonzero vectors with norm <= bound, one of each pair +-v.
std::vector<ShortVector> short_vectors(const EndModule& m, double bound) {
  int n = m.dim();
  std::vector<ShortVector> out;
  // Coordinate box from the per-factor minimum of c^2 + t c d + n d^2.
  long cb = static_cast<long>(std::floor(std::sqrt(bound))) + 1;
  long db = cb;
  if (m.rank() == 2) {
    double disc = static_cast<double>(-m.cm()->discriminant());
    double nn = static_cast<double>(m.cm()->norm);
    db = static_cast<long>(std::floor(std::sqrt(4.0 * bound / disc))) + 1;
    cb = static_cast<long>(std::floor(std::sqrt(4.0 * nn * bound / disc))) + 1;
  }
  IntVec v(n, 0);
  const IntMat& g2 = m.gram2();
  std::function<void(int, mpq_class)> rec = [&](int factor, mpq_class acc) {
    if (acc > bound) return;
    if (factor == m.N()) {
      bool nonzero = false, positive = false;
      for (const auto& x : v)
        if (x != 0) {
          positive = x > 0;
          nonzero = true;
          break;
        }
      if (nonzero && positive) out.push_back({v, acc});
      return;
    }
    if (m.rank() == 1) {
      for (long c = -cb; c <= cb; ++c) {
        v[factor] = c;
        rec(factor + 1, acc + mpq_class(c * c));
      }
      v[factor] = 0;
      return;
    }
    for (long c = -cb; c <= cb; ++c)
      for (long d = -db; d <= db; ++d) {
        v[2 * factor] = c;
        v[2 * factor + 1] = d;
        mpz_class q = g2[2 * factor][2 * factor] * c * c + 2 * g2[2 * factor][2 * factor + 1] * c * d +
                      g2[2 * factor + 1][2 * factor + 1] * d * d;
        rec(factor + 1, acc + mpq_class(q, 2));
      }
    v[2 * factor] = 0;
    v[2 * factor + 1] = 0;
  };
  rec(0, 0);
  std::sort(out.begin(), out.end(), [](const ShortVector& a, const ShortVector& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return lex_less({a.v}, {b.v});
  });
  return out;
}

/// Saturated modules of End-rank g found from g-tuples of short vectors
/// whose norm product is at most bound.
bool collect_modules(const EndModule& m, int g, double bound, std::uint64_t& steps, std::uint64_t cap,
                     std::map<std::string, AbelianSubvariety>& found) {
  auto vecs = short_vectors(m, bound);
  int n = m.dim();
  IntMat chosen;
  bool complete = true;
  std::function<void(size_t, mpq_class)> rec = [&](size_t start, mpq_class prod) {
    if (!complete) return;
    if (static_cast<int>(chosen.size()) == g) {
      AbelianSubvariety b(m, chosen);
      found.emplace(b.key(), b);
      return;
    }
    for (size_t i = start; i < vecs.size(); ++i) {
      if (++steps > cap) {
        complete = false;
        return;
      }
      mpq_class np = prod * vecs[i].norm;
      if (np > bound) break;  // sorted by norm
      IntMat next = chosen;
      next.push_back(vecs[i].v);
      if (rank_of(m.close(next), n) != static_cast<int>(next.size()) * m.rank()) continue;
      chosen = next;
      rec(i + 1, np);
      chosen.pop_back();
      if (!complete) return;
    }
  };
  rec(0, 1);
  return complete;
}

}  // namespace

SubvarietyEnumeration enumerate_subvarieties(const CurveSpec& curve, const mpz_class& max_degree,
                                             const Budget& budget) {
  EndModule m(curve);
  int N = m.N();
  SubvarietyEnumeration res;
  std::map<std::string, AbelianSubvariety> found;
  std::uint64_t steps = 0;
  for (int g = 1; g <= N - 1; ++g) {
    mpq_class dmax(max_degree, factorial_pow3(g));
    dmax.canonicalize();
    if (dmax < 1) continue;
    std::map<std::string, AbelianSubvariety> part;
    bool ok;
    if (m.rank() == 1 && 2 * g > N) {
      // Complements have the same Gram determinant.
      ok = collect_modules(m, N - g, minkowski_constant(N - g) * dmax.get_d() * (1 + 1e-12), steps,
                           budget.max_steps, part);
      std::map<std::string, AbelianSubvariety> comp;
      for (auto& [k, b] : part) {
        AbelianSubvariety c = orth_complement(b);
        comp.emplace(c.key(), c);
      }
      part.swap(comp);
    } else {
      double dabs = m.rank() == 2 ? static_cast<double>(-m.cm()->discriminant()) : 0.0;
      double bound = m.rank() == 1
                         ? minkowski_constant(g) * dmax.get_d()
                         : minkowski_constant(2 * g) * std::pow(dabs / 4.0, g) * dmax.get_d() * dmax.get_d();
      ok = collect_modules(m, g, bound * (1 + 1e-12), steps, budget.max_steps, part);
    }
    if (!ok) res.complete = false;
    for (auto& [k, b] : part)
      if (b.dim() == g && degree(b) <= max_degree) found.emplace(k, b);
    if (!res.complete) break;
  }
  std::vector<std::pair<mpz_class, AbelianSubvariety>> items;
  for (auto& [k, b] : found) items.push_back({degree(b), b});
  std::sort(items.begin(), items.end(), [](const auto& l, const auto& r) {
    if (l.first != r.first) return l.first < r.first;
    return lex_less(l.second.canonical_form(), r.second.canonical_form());
  });
  for (auto& [d, b] : items) res.items.push_back(b);
  return res;
}

std::string TorsionCoset::key() const {
  std::string s = base.key() + "+(";
  for (size_t i = 0; i < zeta.size(); ++i) s += (i ? "," : "") + zeta[i].get_str();
  return s + ")";
}

IntMat period_sublattice(const AbelianSubvariety& b) {
  const EndModule& m = b.module();
  int N = m.N();
  IntMat rows;
  for (const auto& v : b.canonical_form()) {
    IntVec ra(2 * N, 0), rb(2 * N, 0);
    for (int i = 0; i < N; ++i) {
      if (m.rank() == 1) {
        ra[2 * i] = v[i];
        rb[2 * i + 1] = v[i];
      } else {
        auto [p, q, r, s] = m.period_action();
        const mpz_class& c = v[2 * i];
        const mpz_class& d = v[2 * i + 1];
        ra[2 * i] = c + d * p;
        ra[2 * i + 1] = d * q;
        rb[2 * i] = d * r;
        rb[2 * i + 1] = c + d * s;
      }
    }
    rows.push_back(ra);
    rows.push_back(rb);
  }
  return rows.empty() ? rows : saturate(rows, 2 * N);
}

TorsionCoset make_coset(const AbelianSubvariety& base, const RatVec& zeta) {
  int n2 = 2 * base.N();
  if (static_cast<int>(zeta.size()) != n2) throw DomainError("torsion translate has the wrong length");
  IntMat P = period_sublattice(base);
  int k = static_cast<int>(P.size());
  IntMat W = complete_to_unimodular(P, n2);
  IntMat Wi = unimodular_inverse(W);
  RatVec c(n2, 0);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n2; ++i) c[j] += zeta[i] * Wi[i][j];
  mpz_class order = 1;
  for (int j = 0; j < n2; ++j) {
    if (j < k) {
      c[j] = 0;
    } else {
      c[j] = frac(c[j]);
      mpz_lcm(order.get_mpz_t(), order.get_mpz_t(), c[j].get_den_mpz_t());
    }
  }
  RatVec z(n2, 0);
  for (int i = 0; i < n2; ++i) {
    for (int j = 0; j < n2; ++j) z[i] += c[j] * W[j][i];
    z[i] = frac(z[i]);
  }
  TorsionCoset t{base, z, 1};
  if (!order.fits_sint_p()) throw DomainError("torsion order too large");
  t.order = static_cast<int>(order.get_si());
  return t;
}

bool coset_contains_torsion(const TorsionCoset& c, const RatVec& zeta) {
  return make_coset(c.base, zeta).zeta == c.zeta;
}

bool point_on_coset(const AmbientPoint& p, const TorsionCoset& c, const CurveSpec& curve, int precision_bits) {
  int N = c.base.N();
  if (p.size() != N) throw DomainError("point and coset live in different powers");
  PrecisionGuard guard(precision_bits);
  PeriodLattice lat = compute_periods(curve, precision_bits);
  std::vector<Real> v(2 * N, Real(0));
  for (int i = 0; i < N; ++i) {
    if (p.factors[i].is_identity) continue;
    auto [s, t] = period_coordinates(elliptic_log(p.factors[i], lat, curve), lat);
    v[2 * i] = s - from_mpq<Real>(c.zeta[2 * i]);
    v[2 * i + 1] = t - from_mpq<Real>(c.zeta[2 * i + 1]);
  }
  IntMat P = period_sublattice(c.base);
  IntMat Wi = unimodular_inverse(complete_to_unimodular(P, 2 * N));
  Real tol = pow(Real(2), -precision_bits / 2);
  for (int j = static_cast<int>(P.size()); j < 2 * N; ++j) {
    Real cj = 0;
    for (int i = 0; i < 2 * N; ++i) cj += v[i] * Real(Wi[i][j].get_mpz_t());
    if (abs(cj - round(cj)) > tol) return false;
  }
  return true;
}

CosetEnumeration enumerate_torsion_cosets(const CurveSpec& curve, const mpz_class& max_degree, int max_order,
                                          const Budget& budget) {
  if (max_order < 1) throw DomainError("max_order must be positive");
  SubvarietyEnumeration subs = enumerate_subvarieties(curve, max_degree, budget);
  CosetEnumeration res;
  res.complete = subs.complete;
  std::uint64_t steps = 0;
  for (const auto& b : subs.items) {
    int n2 = 2 * b.N();
    IntMat P = period_sublattice(b);
    int k = static_cast<int>(P.size());
    IntMat W = complete_to_unimodular(P, n2);
    int free = n2 - k;
    std::set<std::string> seen;
    std::vector<TorsionCoset> local;
    for (int ord = 1; ord <= max_order && res.complete; ++ord) {
      // Coordinates in (1/ord)Z/Z along the complement rows of W.
      std::vector<long> digits(free, 0);
      while (true) {
        if (++steps > budget.max_steps) {
          res.complete = false;
          break;
        }
        long g = ord;
        for (long d : digits) g = std::gcd(g, d);
        if (g == 1) {
          RatVec zeta(n2, 0);
          for (int j = 0; j < free; ++j) {
            mpq_class q(digits[j], ord);
            q.canonicalize();
            for (int i = 0; i < n2; ++i) zeta[i] += q * W[k + j][i];
          }
          for (auto& z : zeta) {
            z.canonicalize();
            z = frac(z);
          }
          TorsionCoset t = make_coset(b, zeta);
          if (t.order <= max_order && seen.insert(t.key()).second) local.push_back(t);
        }
        int pos = 0;
        while (pos < free && ++digits[pos] == ord) digits[pos++] = 0;
        if (pos == free) break;
      }
    }
    std::sort(local.begin(), local.end(), [](const TorsionCoset& l, const TorsionCoset& r) {
      if (l.order != r.order) return l.order < r.order;
      return l.zeta < r.zeta;
    });
    res.items.insert(res.items.end(), local.begin(), local.end());
    if (!res.complete) break;
  }
  return res;
}

}  // namespace tat
