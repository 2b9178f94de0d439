#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tat/abelian.hpp"
#include "tat/bounds.hpp"
#include "tat/variety.hpp"

namespace tat {

enum class Certification { numeric, exact };
std::string to_string(Certification c);

/// A point of V given by elliptic logarithms, with decimal coordinates
/// refined at the scan precision.
struct WitnessPoint {
  std::vector<Complex<double>> z;
  /// "re" or "re+im*i" for x1, y1, ..., xN, yN.
  std::vector<std::string> coords;
  double radius = 0.0;
  std::optional<AmbientPoint> exact;
};

struct TranslateStructure {
  AbelianSubvariety H;
  /// Elliptic logarithms of a point of H + p.
  std::vector<Complex<double>> anchor;
  /// p with coordinates over Q, when recognised.
  std::optional<AmbientPoint> p;
};

enum class ComponentKind { point, translate, full_coset, curve_union };
std::string to_string(ComponentKind k);

struct IntersectionComponent {
  explicit IntersectionComponent(TorsionCoset c) : coset(std::move(c)) {}
  TorsionCoset coset;
  ComponentKind kind = ComponentKind::point;
  std::vector<WitnessPoint> witnesses;
  int est_dim = 0;
  Certification certification = Certification::numeric;
  std::optional<TranslateStructure> translate_structure;
};

enum class BoundVerdict { passes, fails, not_applicable };
std::string to_string(BoundVerdict v);

struct BoundCheck {
  BoundVerdict verdict = BoundVerdict::not_applicable;
  double hhat_p1 = 0.0;
  double hhat_p1_radius = 0.0;
  bool degree_ok = false;
  /// The height test at deg V = 1, h(V) = 0, where the bound is smallest.
  bool passes_at_minimal_inputs = false;
  std::string note;
};

struct AnomalyRecord {
  explicit AnomalyRecord(IntersectionComponent c) : component(std::move(c)) {}
  IntersectionComponent component;
  std::optional<TorsionCoset> minimal_B;
  /// False when no enumerated coset contains the component.
  bool resolved = false;
  int type = 0;
  int relative_codim = 0;
  bool anomalous = false;
  bool is_maximal = true;
  BoundCheck bound_check;
};

/// Shared numerical state of a scan: periods, evaluators and the cosets.
class ScanContext {
 public:
  ScanContext(const VarietyModel& v, const CurveSpec& curve, const CosetEnumeration& cosets, int max_order,
              int precision_bits, std::uint64_t seed);
  ~ScanContext();
  ScanContext(const ScanContext&) = delete;
  ScanContext& operator=(const ScanContext&) = delete;

  const VarietyModel& variety() const;
  const CurveSpec& curve() const;
  const CosetEnumeration& cosets() const;
  int max_order() const;
  /// Whether every witness of the component lies on the other component.
  bool contains(const IntersectionComponent& big, const IntersectionComponent& small) const;

  struct Impl;
  Impl& impl() const { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

/// Components of V cap coset found by pulling the equations back to E^g.
std::vector<IntersectionComponent> pullback_intersection(const ScanContext& ctx, const TorsionCoset& coset);

AnomalyRecord classify(const ScanContext& ctx, const IntersectionComponent& component);

/// Marks records contained in an anomalous record of larger dimension.
std::vector<AnomalyRecord> maximality_filter(const ScanContext& ctx, std::vector<AnomalyRecord> records);

/// hhat(p1) against the height bound and deg H against the degree bound.
BoundCheck verify_bound(const AnomalyRecord& record, const BoundReport& report, const ConstantsLedger& ledger,
                        const CurveSpec& curve);

struct ScanOptions {
  mpz_class max_degree{1};
  int max_order = 1;
  int precision_bits = 128;
  std::uint64_t seed = 1;
  Budget budget;
  /// Nonzero: process the cosets in a shuffled order (the output must not change).
  std::uint64_t order_seed = 0;
};

struct ScanResult {
  std::vector<AnomalyRecord> records;
  BoundReport bounds;
  ConstantsLedger ledger;
  bool complete = true;
  std::size_t cosets_scanned = 0;
  std::size_t torsion_points_scanned = 0;
};

ScanResult scan(const VarietyModel& v, const CurveSpec& curve, const ScanOptions& opt, const ConstantsLedger& ledger);

}  // namespace tat
