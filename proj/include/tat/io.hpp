#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "tat/anomaly.hpp"
#include "tat/bounds.hpp"
#include "tat/curve.hpp"

namespace tat {

/// One `key = value` line of a structured text file.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits text into key/value pairs; '#' starts a comment. Throws
/// ParseError on malformed lines or repeated keys.
std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& source);
std::string read_file(const std::string& path);

/// Keys: A, B, N (default 1), cm = trace,norm[,sign] (optional).
CurveSpec parse_curve(const std::string& text, const std::string& source);
CurveSpec load_curve(const std::string& path);

/// Exact point "x,y" or "O"; factors of an ambient point are separated by ';'.
CurvePoint parse_curve_point(const std::string& text);
AmbientPoint parse_ambient_point(const std::string& text);
std::string format_ambient_point(const AmbientPoint& p);

/// A planted translate H + p inside a minimal torsion coset, for fixtures.
struct PlantedStructure {
  std::vector<IntVec> H;
  AmbientPoint p;
  std::vector<IntVec> minimal_B;
};

/// Keys: N, f1, f2 (optional for bound-only files), deg_V (optional),
/// h_V, planted.H, planted.p, planted.B.
struct VarietyFile {
  int N = 0;
  std::optional<std::array<MultiPoly, 2>> equations;
  std::array<std::string, 2> equation_text;
  std::optional<mpz_class> deg_V;
  double h_V = 0.0;
  std::optional<PlantedStructure> planted;
};
VarietyFile parse_variety(const std::string& text, const std::string& source);
VarietyFile load_variety(const std::string& path);

/// Keys c1..c5 and cK.provenance; missing constants keep the defaults.
/// Optional keys N and c6..c10, C record the expected derived values.
struct ConstantsFile {
  BaseConstants base;
  std::optional<int> N;
  std::vector<std::pair<std::string, double>> expected;
};
ConstantsFile parse_constants(const std::string& text, const std::string& source, const BaseConstants& defaults);
ConstantsFile load_constants(const std::string& path, const BaseConstants& defaults);

using Json = nlohmann::ordered_json;

Json to_json(const CurveSpec& curve);
Json to_json(const ConstantsLedger& ledger);
Json to_json(const BoundReport& report);
Json to_json(const AbelianSubvariety& b);
Json to_json(const TorsionCoset& c);
Json to_json(const AmbientPoint& p);
Json to_json(const AnomalyRecord& r);
Json to_json(const ApproximationResult& r);

/// Report envelope: {"report": kind, "schema_version": 1, ...}.
Json make_report(const std::string& kind);
Json scan_report(const ScanResult& result, const CurveSpec& curve, const VarietyModel& v, const ScanOptions& opt);
/// One line per record: type,relative_codim,maximal,est_dim,minimal_B,H,verdict.
std::string scan_csv(const ScanResult& result);

/// Decimal rendering of an mpz or double fit for JSON.
std::string to_decimal(const mpz_class& z);

}  // namespace tat
