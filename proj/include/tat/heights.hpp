#pragma once

#include <string>
#include <vector>

#include "tat/abelian.hpp"
#include "tat/curve.hpp"

namespace tat {

enum class HeightKind { weil, normalized, neron_tate };
std::string to_string(HeightKind k);

struct HeightValue {
  double value = 0.0;
  double error_radius = 0.0;
  HeightKind kind = HeightKind::weil;
};

/// Signed value with an error radius (height pairings).
struct PairingValue {
  double value = 0.0;
  double error_radius = 0.0;
};

/// h2 <= 3 hhat + c1 and hhat <= h2/3 + c2 on E^N.
struct ConversionConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  enum class Source { user_supplied, default_derived } source = Source::default_derived;
};

enum class MinimumKind { normalized, neron_tate };
enum class MinimumMethod { zhang_from_height, philippon_exact, sampling };
std::string to_string(MinimumKind k);
std::string to_string(MinimumMethod m);

struct EssentialMinimumEstimate {
  double lower = 0.0;
  double upper = 0.0;
  MinimumKind kind = MinimumKind::normalized;
  MinimumMethod method = MinimumMethod::zhang_from_height;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Absolute logarithmic Weil height of a projective point with coordinates
/// in Q or one quadratic field.
HeightValue weil_height_projective(const std::vector<QuadElem>& coords);
/// Height with the l2-norm at the infinite places.
HeightValue normalized_height_projective(const std::vector<QuadElem>& coords);

/// Heights of [x:y:1] and of the Segre image of an ambient point.
HeightValue weil_height(const CurvePoint& p);
HeightValue weil_height(const AmbientPoint& p);
HeightValue normalized_height_point(const CurvePoint& p);
HeightValue normalized_height_point(const AmbientPoint& p);

/// Neron-Tate height, normalised so that hhat ~ h(x)/2, with error radius
/// at most target_radius per factor.
/// Caps the working precision of canonical heights (0: no cap); returns the
/// previous cap. Exceeding it raises PrecisionError.
int set_height_precision_cap(int bits);

HeightValue neron_tate(const CurvePoint& p, const CurveSpec& curve, double target_radius = 1e-12);
HeightValue neron_tate(const AmbientPoint& p, const CurveSpec& curve, double target_radius = 1e-12);

struct TorsionPoint;

/// hhat of the points of torsion_points(n), in order, by Tate's limit
/// h(x([2^K]P)) / (2 4^K). The x-coordinates are roots of f_n or of
/// x^3 + Ax + B; their Weil heights come from the factors of those
/// polynomials over Q, found from root subsets and checked by exact
/// division. The radius is Silverman's bound divided by 4^K.
std::vector<HeightValue> neron_tate_torsion(int n, const std::vector<TorsionPoint>& pts, const CurveSpec& curve,
                                            double target_radius = 1e-9);

/// <P,Q> = (hhat(P+Q) - hhat(P) - hhat(Q))/2.
PairingValue height_pairing(const CurvePoint& p, const CurvePoint& q, const CurveSpec& curve);

/// Defaults from the classical bounds between h(x) and hhat.
ConversionConstants default_conversion_constants(const CurveSpec& curve);

/// Interval for the other kind (normalized <-> neron_tate).
Interval convert_heights(const HeightValue& v, HeightKind target, const ConversionConstants& consts);

/// mu(X) in [h_X/((1+dim_X) deg_X), h_X/deg_X].
EssentialMinimumEstimate zhang_interval(double deg_X, double h_X, int dim_X);

/// Height pairings <P_j, P_l> and, with CM, <gamma P_j, P_l> of the factors of p.
struct PairingData {
  int N = 0;
  long trace = 0, norm = 0;
  std::vector<std::vector<PairingValue>> G;
  std::vector<std::vector<PairingValue>> G_gamma;
};
PairingData pairing_data(const AmbientPoint& p, const CurveSpec& curve);

/// muhat(H + p) = hhat of the component of p orthogonal to H.
EssentialMinimumEstimate translate_essential_minimum(const AbelianSubvariety& H, const AmbientPoint& p,
                                                     const CurveSpec& curve);
EssentialMinimumEstimate translate_essential_minimum(const AbelianSubvariety& H, const PairingData& data);

}  // namespace tat
