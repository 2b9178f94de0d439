#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tat/analytic.hpp"
#include "tat/curve.hpp"
#include "tat/polynomial.hpp"

namespace tat {

enum class DegreeSource { user, pole_bound };
std::string to_string(DegreeSource s);

/// V in E^N cut out by two polynomials in x1, y1, ..., xN, yN.
struct VarietyModel {
  int N = 0;
  std::array<MultiPoly, 2> equations;
  mpz_class deg_V;
  DegreeSource deg_source = DegreeSource::user;
  double h_V = 0.0;
  int dim_V = 0;
};

/// Replaces y_i^2 by x_i^3 + A x_i + B until every y_i has degree <= 1.
MultiPoly reduce_mod_curve(const MultiPoly& f, const CurveSpec& curve);

/// Pole order of f along {P_i = O} for each factor i: max of 2a + 3b over
/// the monomials x_i^a y_i^b of the reduced polynomial.
std::vector<int> pole_weights(const MultiPoly& f, const CurveSpec& curve);

/// 3^(N-2) (N-2)! sum_{j != k} w1_j w2_k, the intersection number of the
/// two pole divisors with L^(N-2), L the Segre hyperplane class. An upper
/// bound for deg V when the equations cut codimension 2.
mpz_class degree_upper_bound(const std::array<MultiPoly, 2>& eqs, const CurveSpec& curve);

/// Validates the equations (variables, N >= 2), fills deg_V (from the
/// pole bound when absent) and checks codimension 2 at a sampled point.
VarietyModel make_variety(const std::array<MultiPoly, 2>& eqs, const CurveSpec& curve,
                          const std::optional<mpz_class>& deg_V, double h_V, std::uint64_t seed = 1);

/// The equations of V and their z-derivatives at points of E^N given by
/// elliptic coordinates.
template <class S>
class VarietyEvaluator {
 public:
  using C = Complex<S>;
  VarietyEvaluator(const VarietyModel& v, const CurveSpec& curve, const PeriodLattice& lat);

  struct Value {
    std::array<C, 2> f;
    /// df_j / dz_i.
    std::array<std::vector<C>, 2> grad;
    /// Sum of absolute values of the terms of f_j.
    std::array<S, 2> scale;
  };
  /// nullopt when some z_i is too close to a period (pole of x_i, y_i).
  std::optional<Value> eval(const std::vector<C>& z) const;
  const WeierstrassModel<S>& model() const { return model_; }
  int N() const { return N_; }

 private:
  int N_;
  std::array<MultiPoly, 2> f_;
  std::array<std::vector<MultiPoly>, 2> df_;
  WeierstrassModel<S> model_;
  S A_;
};

/// z = base + beta t for t in C^g; beta has N rows and g columns.
template <class S>
struct AffineParam {
  std::vector<std::vector<Complex<S>>> beta;
  std::vector<Complex<S>> base;
  int g() const { return beta.empty() ? 0 : static_cast<int>(beta[0].size()); }
  std::vector<Complex<S>> at(const std::vector<Complex<S>>& t) const;
};

template <class S>
struct Solution {
  std::vector<Complex<S>> t;
  std::vector<Complex<S>> z;
  /// Largest |f_j| / scale_j.
  double residual = 0.0;
  /// Numerical rank of the 2 x g Jacobian in t.
  int rank = 0;
  /// Size of the last accepted Newton step in t.
  double last_step = 0.0;
};

/// Damped Gauss-Newton for f1 = f2 = 0 along the parametrisation.
template <class S>
std::optional<Solution<S>> newton_solve(const VarietyEvaluator<S>& ev, const AffineParam<S>& param,
                                        std::vector<Complex<S>> t0, double tol, int max_iter = 80);

/// Deterministic uniform doubles in [0,1) from a 64-bit seed.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : s_(seed ^ 0x9e3779b97f4a7c15ULL) {}
  double next();

 private:
  std::uint64_t s_;
};

}  // namespace tat
