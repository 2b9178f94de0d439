#include "tat/quadratic.hpp"

#include <sstream>

#include "tat/errors.hpp"

namespace tat {

long squarefree_part(long n) {
  if (n == 0) throw DomainError("squarefree_part of zero");
  long sign = n < 0 ? -1 : 1;
  long m = n < 0 ? -n : n;
  long out = 1;
  for (long p = 2; p * p <= m; ++p) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e % 2 == 1) out *= p;
  }
  return sign * out * m;
}

QuadElem::QuadElem(mpq_class a, mpq_class b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
  if (b_ != 0 && (d_ == 0 || d_ == 1)) throw DomainError("quadratic element needs a non-square d");
  normalize();
}

void QuadElem::normalize() {
  a_.canonicalize();
  b_.canonicalize();
  if (b_ == 0) d_ = 0;
}

long QuadElem::join(long d1, long d2) {
  if (d1 == 0) return d2;
  if (d2 == 0 || d1 == d2) return d1;
  throw DomainError("arithmetic between different quadratic fields");
}

QuadElem QuadElem::conj() const { return QuadElem(a_, -b_, d_); }

QuadElem& QuadElem::operator+=(const QuadElem& o) {
  d_ = join(d_, o.d_);
  a_ += o.a_;
  b_ += o.b_;
  normalize();
  return *this;
}

QuadElem& QuadElem::operator-=(const QuadElem& o) {
  d_ = join(d_, o.d_);
  a_ -= o.a_;
  b_ -= o.b_;
  normalize();
  return *this;
}

QuadElem& QuadElem::operator*=(const QuadElem& o) {
  long d = join(d_, o.d_);
  mpq_class a = a_ * o.a_ + b_ * o.b_ * d;
  mpq_class b = a_ * o.b_ + b_ * o.a_;
  a_ = a;
  b_ = b;
  d_ = d;
  normalize();
  return *this;
}

QuadElem& QuadElem::operator/=(const QuadElem& o) {
  if (o.is_zero()) throw DomainError("division by zero in quadratic field");
  mpq_class n = o.norm();
  QuadElem inv(o.a_ / n, -o.b_ / n, o.d_);
  return *this *= inv;
}

bool operator==(const QuadElem& x, const QuadElem& y) {
  return x.a_ == y.a_ && x.b_ == y.b_ && (x.b_ == 0 || x.d_ == y.d_);
}

std::string QuadElem::to_string() const {
  std::ostringstream os;
  os << a_.get_str();
  if (b_ != 0) os << (b_ > 0 ? "+" : "-") << mpq_class(abs(b_)).get_str() << "*sqrt(" << d_ << ")";
  return os.str();
}

std::optional<mpq_class> recognize_rational(const Real& x, const mpz_class& max_den, const Real& tol) {
  // Convergents p_k/q_k of the continued fraction of x.
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Real r = x;
  std::optional<mpq_class> best;
  for (int it = 0; it < 400; ++it) {
    Real fl = floor(r);
    mpz_class a = floor_mpz(fl);
    mpz_class p2 = a * p1 + p0;
    mpz_class q2 = a * q1 + q0;
    if (q2 > max_den) break;
    mpq_class cand(p2, q2);
    cand.canonicalize();
    if (abs(x - from_mpq<Real>(cand)) <= tol) {
      best = cand;
      break;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Real frac = r - fl;
    if (frac == 0) break;
    r = 1 / frac;
  }
  return best;
}

std::optional<QuadElem> recognize_quadratic(const Complex<Real>& z, long d, int sign, const mpz_class& max_den,
                                            const Real& tol) {
  auto a = recognize_rational(z.real(), max_den, tol);
  if (!a) return std::nullopt;
  if (abs(z.imag()) <= tol) return QuadElem(*a);
  if (d >= 0) return std::nullopt;
  Real scale = sqrt(Real(-d)) * sign;
  auto b = recognize_rational(z.imag() / scale, max_den, tol);
  if (!b) return std::nullopt;
  return QuadElem(*a, *b, d);
}

}  // namespace tat
