#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tat/curve.hpp"
#include "tat/lattice.hpp"

namespace tat {

/// End(E)^N as a free Z-module of rank N*r (r = 1, or 2 with CM), with the
/// real part of the Hermitian form and the action of the CM generator.
/// With CM, coordinates of factor i are (c, d) for c + d*gamma.
class EndModule {
 public:
  explicit EndModule(const CurveSpec& curve);

  int N() const { return N_; }
  int rank() const { return r_; }
  int dim() const { return N_ * r_; }
  const std::optional<CmOrder>& cm() const { return cm_; }
  /// Twice the real part of the Hermitian form, per factor [[2,t],[t,2n]].
  const IntMat& gram2() const { return gram2_; }
  /// Multiplication by gamma (identity without CM).
  IntVec gamma(const IntVec& v) const;
  /// Adds gamma-images so the row span becomes an End(E)-module.
  IntMat close(const IntMat& rows) const;
  IntVec from_end(const std::vector<EndElem>& u) const;
  std::vector<EndElem> to_end(const IntVec& v) const;
  /// Action of gamma on the period basis: gamma*omega1 = p*omega1 + q*omega2,
  /// gamma*omega2 = r*omega1 + s*omega2 (identity without CM).
  const std::array<long, 4>& period_action() const { return period_action_; }

  friend bool operator==(const EndModule& a, const EndModule& b) {
    return a.N_ == b.N_ && a.r_ == b.r_;
  }

 private:
  int N_;
  int r_;
  std::optional<CmOrder> cm_;
  IntMat gram2_;
  std::array<long, 4> period_action_{1, 0, 0, 1};
};

/// A saturated End(E)-submodule of End(E)^N, i.e. an abelian subvariety of E^N.
class AbelianSubvariety {
 public:
  AbelianSubvariety(const EndModule& module, const IntMat& generators);
  static AbelianSubvariety zero(const EndModule& module);
  static AbelianSubvariety full(const EndModule& module);
  /// Subvariety spanned by End(E)-vectors (columns of the basis matrix).
  static AbelianSubvariety from_columns(const EndModule& module, const std::vector<std::vector<EndElem>>& columns);

  const EndModule& module() const { return module_; }
  int dim() const { return static_cast<int>(hnf_.size()) / module_.rank(); }
  int N() const { return module_.N(); }
  /// Hermite-reduced Z-basis, the canonical form.
  const IntMat& canonical_form() const { return hnf_; }
  /// dim() End(E)-vectors whose End(E)-span has finite index in the module.
  std::vector<std::vector<EndElem>> basis() const;
  bool contains(const IntVec& v) const;
  bool contains(const AbelianSubvariety& other) const;
  std::string key() const { return to_string(hnf_); }

  friend bool operator==(const AbelianSubvariety& a, const AbelianSubvariety& b) { return a.hnf_ == b.hnf_; }
  friend bool operator!=(const AbelianSubvariety& a, const AbelianSubvariety& b) { return !(a == b); }

 private:
  EndModule module_;
  IntMat hnf_;
};

/// deg B = g! 3^g det(M^dagger M), integrality asserted.
mpz_class degree(const AbelianSubvariety& b);
AbelianSubvariety orth_complement(const AbelianSubvariety& b);
AbelianSubvariety sum(const AbelianSubvariety& a, const AbelianSubvariety& b);
AbelianSubvariety intersect_identity_component(const AbelianSubvariety& a, const AbelianSubvariety& b);
/// Order of the finite group B cap B-perp: the index i of B + B-perp in
/// End(E)^N, squared without CM.
mpz_class intersection_with_complement_order(const AbelianSubvariety& b);

/// phi_B : E^N -> E^r with kernel B + (finite group).
struct KernelMorphism {
  std::vector<std::vector<EndElem>> rows;
  int r = 0;
};
KernelMorphism kernel_morphism(const AbelianSubvariety& b);

/// Work cap for enumerations; TAT_BUDGET overrides the default in the CLI.
struct Budget {
  std::uint64_t max_steps = 5'000'000;
};

struct SubvarietyEnumeration {
  std::vector<AbelianSubvariety> items;
  bool complete = true;
};

/// Every abelian subvariety of dimension 1 <= g <= N-1 with degree at most
/// max_degree, ordered by (degree, canonical form).
SubvarietyEnumeration enumerate_subvarieties(const CurveSpec& curve, const mpz_class& max_degree,
                                             const Budget& budget = {});

/// B0 + zeta with zeta in period coordinates: 2N rationals in [0,1) laid
/// out as (a_1, b_1, ..., a_N, b_N), z_i = a_i omega1 + b_i omega2.
struct TorsionCoset {
  AbelianSubvariety base;
  RatVec zeta;
  int order = 1;
  int dim() const { return base.dim(); }
  std::string key() const;
};

/// Rows spanning Lie(B) cap Lambda^N in period coordinates (rank 2g in Z^2N).
IntMat period_sublattice(const AbelianSubvariety& b);
/// Canonical representative of zeta modulo the periods of B.
TorsionCoset make_coset(const AbelianSubvariety& base, const RatVec& zeta);
/// Whether the torsion point with period coordinates zeta lies on the coset.
bool coset_contains_torsion(const TorsionCoset& c, const RatVec& zeta);

/// Whether the point lies on the coset, tested on elliptic logarithms.
bool point_on_coset(const AmbientPoint& p, const TorsionCoset& c, const CurveSpec& curve, int precision_bits = 128);

struct CosetEnumeration {
  std::vector<TorsionCoset> items;
  bool complete = true;
};

/// Cosets B0 + zeta with deg B0 <= max_degree and ord(zeta) <= max_order,
/// each once; ordered by (degree, canonical form, order, zeta).
CosetEnumeration enumerate_torsion_cosets(const CurveSpec& curve, const mpz_class& max_degree, int max_order,
                                          const Budget& budget = {});

}  // namespace tat
