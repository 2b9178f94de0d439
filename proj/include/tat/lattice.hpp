#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace tat {

/// Dense integer matrix stored as a list of rows.
using IntVec = std::vector<mpz_class>;
using IntMat = std::vector<IntVec>;
using RatVec = std::vector<mpq_class>;
using RatMat = std::vector<RatVec>;

IntMat identity_matrix(int n);
IntMat transpose(const IntMat& a, int cols = -1);
IntMat multiply(const IntMat& a, const IntMat& b);
int column_count(const IntMat& a, int fallback = 0);

/// Row-style Hermite normal form: U*A = H with U unimodular, H in echelon
/// form with positive pivots and entries above each pivot reduced into
/// [0, pivot). Zero rows are kept at the bottom; rank counts nonzero rows.
struct HermiteForm {
  IntMat H;
  IntMat U;
  int rank = 0;
};
HermiteForm hermite_form(const IntMat& a, int cols);

/// Nonzero rows of the Hermite normal form: the canonical basis of the row lattice.
IntMat hnf_basis(const IntMat& a, int cols);

/// Basis (rows) of {x in Z^cols : A x = 0}; always saturated.
IntMat integer_kernel(const IntMat& a, int cols);

/// Basis of (Q-span of rows) intersected with Z^cols.
IntMat saturate(const IntMat& a, int cols);

/// LLL reduction (delta = 0.99) of independent rows for the inner product
/// x^T G y with G symmetric positive definite (identity when empty).
IntMat lll_reduce(const IntMat& rows, const IntMat& gram = {});

/// Bareiss determinant of a square integer matrix.
mpz_class determinant(const IntMat& a);

/// Gram matrix rows * G * rows^T (G identity when empty).
IntMat gram_matrix(const IntMat& rows, const IntMat& gram = {});

/// Completes the rows of a saturated lattice to a unimodular matrix whose
/// first rows are the given ones.
IntMat complete_to_unimodular(const IntMat& rows, int cols);

/// Inverse of a unimodular matrix.
IntMat unimodular_inverse(const IntMat& a);

mpz_class dot(const IntVec& a, const IntVec& b);
std::string to_string(const IntMat& a);

}  // namespace tat
