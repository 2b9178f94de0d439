#include "tat/lattice.hpp"

#include <sstream>
#include <utility>

#include "tat/errors.hpp"

namespace tat {

IntMat identity_matrix(int n) {
  IntMat m(n, IntVec(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

int column_count(const IntMat& a, int fallback) { return a.empty() ? fallback : static_cast<int>(a[0].size()); }

IntMat transpose(const IntMat& a, int cols) {
  int c = column_count(a, cols < 0 ? 0 : cols);
  IntMat t(c, IntVec(a.size(), 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (int j = 0; j < c; ++j) t[j][i] = a[i][j];
  return t;
}

IntMat multiply(const IntMat& a, const IntMat& b) {
  if (a.empty()) return {};
  size_t inner = a[0].size();
  if (b.size() != inner) throw ConsistencyError("matrix dimensions do not match");
  size_t cols = b.empty() ? 0 : b[0].size();
  IntMat c(a.size(), IntVec(cols, 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

mpz_class dot(const IntVec& a, const IntVec& b) {
  mpz_class s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

void axpy_row(IntVec& dst, const IntVec& src, const mpz_class& q) {
  if (q == 0) return;
  for (size_t j = 0; j < dst.size(); ++j) dst[j] -= q * src[j];
}

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

HermiteForm hermite_form(const IntMat& a, int cols) {
  HermiteForm f;
  f.H = a;
  int m = static_cast<int>(a.size());
  f.U = identity_matrix(m);
  int row = 0;
  for (int col = 0; col < cols && row < m; ++col) {
    while (true) {
      int best = -1;
      for (int i = row; i < m; ++i)
        if (f.H[i][col] != 0 && (best < 0 || abs(f.H[i][col]) < abs(f.H[best][col]))) best = i;
      if (best < 0) break;
      std::swap(f.H[row], f.H[best]);
      std::swap(f.U[row], f.U[best]);
      bool done = true;
      for (int i = row + 1; i < m; ++i) {
        if (f.H[i][col] == 0) continue;
        mpz_class q = floor_div(f.H[i][col], f.H[row][col]);
        axpy_row(f.H[i], f.H[row], q);
        axpy_row(f.U[i], f.U[row], q);
        if (f.H[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (f.H[row][col] == 0) continue;
    if (f.H[row][col] < 0) {
      for (auto& v : f.H[row]) v = -v;
      for (auto& v : f.U[row]) v = -v;
    }
    for (int i = 0; i < row; ++i) {
      mpz_class q = floor_div(f.H[i][col], f.H[row][col]);
      axpy_row(f.H[i], f.H[row], q);
      axpy_row(f.U[i], f.U[row], q);
    }
    ++row;
  }
  f.rank = row;
  return f;
}

IntMat hnf_basis(const IntMat& a, int cols) {
  HermiteForm f = hermite_form(a, cols);
  return IntMat(f.H.begin(), f.H.begin() + f.rank);
}

IntMat integer_kernel(const IntMat& a, int cols) {
  if (a.empty()) return identity_matrix(cols);
  IntMat t = transpose(a, cols);
  HermiteForm f = hermite_form(t, static_cast<int>(a.size()));
  IntMat k(f.U.begin() + f.rank, f.U.end());
  return k.empty() ? k : hnf_basis(k, cols);
}

IntMat saturate(const IntMat& a, int cols) {
  if (a.empty()) return {};
  IntMat k = integer_kernel(a, cols);
  if (k.empty()) return identity_matrix(cols);
  return integer_kernel(k, cols);
}

IntMat gram_matrix(const IntMat& rows, const IntMat& gram) {
  IntMat g(rows.size(), IntVec(rows.size(), 0));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.size(); ++j) {
      if (gram.empty()) {
        g[i][j] = dot(rows[i], rows[j]);
      } else {
        mpz_class s = 0;
        for (size_t p = 0; p < rows[i].size(); ++p)
          for (size_t q = 0; q < rows[j].size(); ++q) s += rows[i][p] * gram[p][q] * rows[j][q];
        g[i][j] = s;
      }
    }
  return g;
}

IntMat lll_reduce(const IntMat& input, const IntMat& gram) {
  IntMat b = input;
  int n = static_cast<int>(b.size());
  if (n <= 1) return b;
  auto ip = [&](const IntVec& x, const IntVec& y) -> mpq_class {
    if (gram.empty()) return mpq_class(dot(x, y));
    mpz_class s = 0;
    for (size_t p = 0; p < x.size(); ++p)
      for (size_t q = 0; q < y.size(); ++q) s += x[p] * gram[p][q] * y[q];
    return mpq_class(s);
  };
  const mpq_class delta(99, 100);
  std::vector<std::vector<mpq_class>> mu(n, std::vector<mpq_class>(n));
  std::vector<mpq_class> bn(n);
  auto gso = [&]() {
    // Gram-Schmidt coefficients from inner products.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        mpq_class s = ip(b[i], b[j]);
        for (int k = 0; k < j; ++k) s -= mu[j][k] * mu[i][k] * bn[k];
        mu[i][j] = s / bn[j];
      }
      mpq_class s = ip(b[i], b[i]);
      for (int k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * bn[k];
      bn[i] = s;
      if (bn[i] == 0) throw ConsistencyError("LLL input rows are dependent");
    }
  };
  gso();
  int k = 1;
  int guard = 0;
  while (k < n) {
    if (++guard > 100000) throw ConsistencyError("LLL did not terminate");
    for (int j = k - 1; j >= 0; --j) {
      mpq_class m = mu[k][j];
      mpz_class q;
      mpq_class shifted = m + mpq_class(1, 2);
      mpz_fdiv_q(q.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
      if (q != 0) {
        axpy_row(b[k], b[j], q);
        for (int l = 0; l <= j; ++l) mu[k][l] -= (l == j ? mpq_class(q) : q * mu[j][l]);
      }
    }
    if (bn[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso();
      k = std::max(k - 1, 1);
    }
  }
  return b;
}

mpz_class determinant(const IntMat& input) {
  int n = static_cast<int>(input.size());
  if (n == 0) return 1;
  IntMat a = input;
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        mpz_class v = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = v;
      }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

IntMat complete_to_unimodular(const IntMat& rows, int cols) {
  if (rows.empty()) return identity_matrix(cols);
  IntMat t = transpose(rows, cols);
  HermiteForm f = hermite_form(t, static_cast<int>(rows.size()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (int j = 0; j < static_cast<int>(rows.size()); ++j)
      if (f.H[i][j] != (i == j ? 1 : 0)) throw ConsistencyError("rows are not a saturated lattice basis");
  return transpose(unimodular_inverse(f.U));
}

IntMat unimodular_inverse(const IntMat& a) {
  int n = static_cast<int>(a.size());
  HermiteForm f = hermite_form(a, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (f.H[i][j] != (i == j ? 1 : 0)) throw ConsistencyError("matrix is not unimodular");
  return f.U;
}

std::string to_string(const IntMat& a) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) os << ",";
    os << "[";
    for (size_t j = 0; j < a[i].size(); ++j) os << (j ? "," : "") << a[i][j].get_str();
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace tat
