#include "tat/polynomial.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "tat/errors.hpp"

namespace tat {

UniPoly::UniPoly(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { trim(); }

UniPoly UniPoly::monomial(const mpz_class& c, int deg) {
  std::vector<mpz_class> v(deg + 1, mpz_class(0));
  v[deg] = c;
  return UniPoly(std::move(v));
}

void UniPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), mpz_class(0));
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), mpz_class(0));
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpz_class> out(a.c_.size() + b.c_.size() - 1, mpz_class(0));
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return UniPoly(std::move(out));
}

UniPoly operator*(const mpz_class& s, const UniPoly& a) {
  std::vector<mpz_class> out = a.c_;
  for (auto& c : out) c *= s;
  return UniPoly(std::move(out));
}

QuadElem UniPoly::eval(const QuadElem& x) const {
  QuadElem acc(0L);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + QuadElem(*it);
  return acc;
}

mpz_class UniPoly::eval_homogeneous(const mpz_class& X, const mpz_class& Z, int deg) const {
  mpz_class acc = 0;
  for (int i = 0; i <= deg; ++i) {
    mpz_class c = coeff(i);
    if (c == 0) continue;
    mpz_class xp, zp;
    mpz_pow_ui(xp.get_mpz_t(), X.get_mpz_t(), static_cast<unsigned long>(i));
    mpz_pow_ui(zp.get_mpz_t(), Z.get_mpz_t(), static_cast<unsigned long>(deg - i));
    acc += c * xp * zp;
  }
  return acc;
}

namespace {

// Fraction-free (Bareiss) determinant.
mpz_class bareiss_det(std::vector<std::vector<mpz_class>> m) {
  const size_t n = m.size();
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]);
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace

mpz_class resultant(const UniPoly& f, const UniPoly& g) {
  const int m = f.degree(), n = g.degree();
  if (m < 0 || n < 0) return 0;
  const int size = m + n;
  if (size == 0) return 1;
  std::vector<std::vector<mpz_class>> s(size, std::vector<mpz_class>(size, mpz_class(0)));
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) s[r][r + i] = f.coeff(m - i);
  for (int r = 0; r < m; ++r)
    for (int i = 0; i <= n; ++i) s[n + r][r + i] = g.coeff(n - i);
  return bareiss_det(std::move(s));
}

MultiPoly MultiPoly::constant(int nvars, const mpq_class& c) {
  MultiPoly p(nvars);
  if (c != 0) p.terms_[Exponent(nvars, 0)] = c;
  return p;
}

MultiPoly MultiPoly::variable(int nvars, int index) {
  MultiPoly p(nvars);
  Exponent e(nvars, 0);
  e[index] = 1;
  p.terms_[e] = 1;
  return p;
}

bool MultiPoly::is_constant() const {
  for (const auto& [e, c] : terms_)
    for (int k : e)
      if (k != 0) return false;
  return true;
}

int MultiPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

int MultiPoly::group_degree(int group) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[2 * group] + e[2 * group + 1]);
  return d;
}

void MultiPoly::trim() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) terms_[e] += c;
  trim();
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (nvars_ == 0) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) terms_[e] -= c;
  trim();
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) {
  MultiPoly out(std::max(nvars_, o.nvars_));
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      Exponent e(out.nvars_, 0);
      for (int v = 0; v < out.nvars_; ++v) e[v] = e1[v] + e2[v];
      out.terms_[e] += c1 * c2;
    }
  out.trim();
  *this = std::move(out);
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

MultiPoly MultiPoly::pow(int e) const {
  if (e < 0) throw DomainError("negative exponent");
  MultiPoly out = constant(nvars_, 1);
  for (int i = 0; i < e; ++i) out *= *this;
  return out;
}

MultiPoly MultiPoly::derivative(int var) const {
  MultiPoly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    d[var] -= 1;
    out.terms_[d] += c * e[var];
  }
  out.trim();
  return out;
}

std::string MultiPoly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest-degree terms first reads naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    mpq_class a = abs(c);
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    bool unit = (a == 1);
    bool any = false;
    std::ostringstream mono;
    for (int v = 0; v < nvars_; ++v) {
      if (e[v] == 0) continue;
      if (any) mono << "*";
      mono << names[v];
      if (e[v] > 1) mono << "^" << e[v];
      any = true;
    }
    if (!any) os << a.get_str();
    else if (unit) os << mono.str();
    else os << a.get_str() << "*" << mono.str();
  }
  return os.str();
}

std::vector<std::string> affine_variable_names(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) {
    names.push_back("x" + std::to_string(i));
    names.push_back("y" + std::to_string(i));
  }
  return names;
}

namespace {

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

  MultiPoly parse() {
    MultiPoly p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int nv() const { return static_cast<int>(names_.size()); }

  MultiPoly expr() {
    MultiPoly acc = term();
    while (true) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }
  MultiPoly term() {
    MultiPoly acc = unary();
    while (true) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        MultiPoly d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        mpq_class c = d.terms().begin()->second;
        acc *= MultiPoly::constant(nv(), 1 / c);
      } else {
        return acc;
      }
    }
  }
  MultiPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  MultiPoly power() {
    MultiPoly base = primary();
    if (accept('^')) {
      skip();
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      return base.pow(std::stoi(s_.substr(start, pos_ - start)));
    }
    return base;
  }
  MultiPoly primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return MultiPoly::constant(nv(), mpq_class(mpz_class(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      for (int i = 0; i < nv(); ++i)
        if (names_[i] == id) return MultiPoly::variable(nv(), i);
      pos_ = start;
      fail("unknown variable '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& names_;
  size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_polynomial(const std::string& text, const std::vector<std::string>& names) {
  return Parser(text, names).parse();
}

}  // namespace tat
