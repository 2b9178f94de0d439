#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "tat/abelian.hpp"
#include "tat/heights.hpp"

namespace tat {

struct ProvenancedConstant {
  double value = 0.0;
  std::string provenance = "default";
};

/// c1..c5 with provenance, and the derived c6..c10 and C.
struct ConstantsLedger {
  int N = 0;
  ProvenancedConstant c1, c2, c3, c4, c5;
  double c6 = 0, c7 = 0, c8 = 0, c9 = 0, c10 = 0;
  double C = 0;
};

struct BaseConstants {
  ProvenancedConstant c1, c2, c3, c4, c5;
};

/// Defaults: c1, c2 from the height comparison, c3 = N! 3^N,
/// c4 = 3(N+1) c3, c5 = (N+1) c3 c1.
BaseConstants default_base_constants(const CurveSpec& curve);

ConstantsLedger derive_constants(int N, const BaseConstants& base);

/// T = c7^(N-1) deg_V^(N-1).
double choose_T(const ConstantsLedger& ledger, const mpz_class& deg_V);

struct BoundReport {
  mpz_class deg_V;
  double h_V = 0;
  int dim_V = 0;
  double T = 0;
  double hhat_p1_bound = 0;
  double h_Y_bound = 0;
  mpz_class deg_Y_bound;
  /// Natural logarithms of the bounds (finite when the values overflow).
  double log_hhat_p1_bound = 0;
  double log_h_Y_bound = 0;
};

/// Requires dim_V = N - 2.
BoundReport effective_bounds(const ConstantsLedger& ledger, const mpz_class& deg_V, double h_V, int dim_V);

/// deg_X h_Y + deg_Y h_X + (3^N log 2 / 2) deg_X deg_Y.
double bezout_bound(double deg_X, double h_X, double deg_Y, double h_Y, int N);

struct ApproximationResult {
  AbelianSubvariety H;
  mpz_class degree;
  /// Upper bound (1 + dim H) deg H (3 muhat + c1) for h(H + p1).
  double height = 0;
  double muhat_upper = 0;
  /// c4 T^(1 - N/(ks)) hhat(p1) + c5 T.
  double theorem_bound = 0;
  bool meets_bound = false;
  std::size_t candidates = 0;
  bool complete = true;
};

ApproximationResult approximation_search(const AmbientPoint& p1, const TorsionCoset& coset, double T, int k, int s,
                                         const ConstantsLedger& ledger, const CurveSpec& curve,
                                         const Budget& budget = {});

}  // namespace tat
