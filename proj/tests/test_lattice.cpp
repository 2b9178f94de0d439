#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tat/lattice.hpp"

using namespace tat;

namespace {

IntMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  IntMat m;
  for (auto& r : rows) {
    IntVec v;
    for (long x : r) v.push_back(x);
    m.push_back(v);
  }
  return m;
}

// Cofactor expansion, independent of Bareiss.
mpz_class det_expand(const IntMat& a) {
  size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  mpz_class s = 0;
  for (size_t j = 0; j < n; ++j) {
    IntMat minor;
    for (size_t i = 1; i < n; ++i) {
      IntVec r;
      for (size_t k = 0; k < n; ++k)
        if (k != j) r.push_back(a[i][k]);
      minor.push_back(r);
    }
    mpz_class t = a[0][j] * det_expand(minor);
    s += (j % 2 == 0) ? t : mpz_class(-t);
  }
  return s;
}

IntMat random_matrix(std::mt19937& rng, int r, int c, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntMat m(r, IntVec(c));
  for (auto& row : m)
    for (auto& x : row) x = d(rng);
  return m;
}

}  // namespace

TEST_CASE("determinant agrees with cofactor expansion") {
  std::mt19937 rng(7);
  for (int n = 1; n <= 5; ++n)
    for (int rep = 0; rep < 20; ++rep) {
      IntMat a = random_matrix(rng, n, n, -4, 4);
      CHECK(determinant(a) == det_expand(a));
    }
  CHECK(determinant(mat({{0, 1}, {1, 0}})) == -1);
}

TEST_CASE("hermite form is a unimodular row reduction") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    IntMat a = random_matrix(rng, 4, 3, -6, 6);
    HermiteForm f = hermite_form(a, 3);
    CHECK(multiply(f.U, a) == f.H);
    CHECK(abs(determinant(f.U)) == 1);
    // Echelon shape with positive pivots and reduced entries above them.
    int lead = -1;
    for (int i = 0; i < f.rank; ++i) {
      int p = 0;
      while (f.H[i][p] == 0) ++p;
      CHECK(p > lead);
      lead = p;
      CHECK(f.H[i][p] > 0);
      for (int k = 0; k < i; ++k) {
        CHECK(f.H[k][p] >= 0);
        CHECK(f.H[k][p] < f.H[i][p]);
      }
    }
  }
  IntMat h = hnf_basis(mat({{2, 4}, {3, 5}}), 2);
  CHECK(h == mat({{1, 1}, {0, 2}}));
}

TEST_CASE("kernel and saturation") {
  IntMat k = integer_kernel(mat({{1, 2, 3}}), 3);
  CHECK(k.size() == 2);
  for (auto& v : k) CHECK(dot(v, IntVec{1, 2, 3}) == 0);
  // Saturation of 2*(1,1,0): the primitive vector.
  CHECK(saturate(mat({{2, 2, 0}}), 3) == mat({{1, 1, 0}}));
  // Index 2 sublattice of Z^2 saturates to Z^2.
  CHECK(saturate(mat({{1, 1}, {1, -1}}), 2) == mat({{1, 0}, {0, 1}}));
  CHECK(integer_kernel(mat({{1, 0}, {0, 1}}), 2).empty());
}

TEST_CASE("LLL reduces a skewed basis without changing the lattice") {
  IntMat b = mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  IntMat u = mat({{1, 7, 3}, {0, 1, 5}, {0, 0, 1}});
  IntMat skew = multiply(u, b);
  IntMat red = lll_reduce(skew);
  CHECK(abs(determinant(red)) == 1);
  for (auto& v : red) CHECK(dot(v, v) == 1);
  // Custom form: rows stay in the lattice.
  IntMat g = mat({{2, 1}, {1, 2}});
  IntMat r2 = lll_reduce(mat({{5, 3}, {8, 5}}), g);
  CHECK(abs(determinant(r2)) == 1);
  IntMat gm = gram_matrix(r2, g);
  CHECK(gm[0][0] == 2);
}

TEST_CASE("completion to a unimodular matrix") {
  IntMat rows = mat({{1, 1, 0}, {0, 2, 1}});
  IntMat w = complete_to_unimodular(rows, 3);
  CHECK(w[0] == rows[0]);
  CHECK(w[1] == rows[1]);
  CHECK(abs(determinant(w)) == 1);
  IntMat wi = unimodular_inverse(w);
  CHECK(multiply(w, wi) == identity_matrix(3));
  CHECK_THROWS(complete_to_unimodular(mat({{2, 0}}), 2));
}
