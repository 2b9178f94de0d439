#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tat/anomaly.hpp"
#include "tat/errors.hpp"
#include "tat/heights.hpp"
#include "tat/io.hpp"

using namespace tat;

namespace {

std::string planted_path(int i, const char* ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return std::string(TAT_DATA_DIR) + "/planted/" + buf + ext;
}

struct Instance {
  CurveSpec curve;
  VarietyFile file;
  VarietyModel v;
  ConstantsLedger ledger;
};

Instance load_instance(int i) {
  CurveSpec E = load_curve(planted_path(i, ".curve"));
  VarietyFile f = load_variety(planted_path(i, ".variety"));
  VarietyModel v = make_variety(*f.equations, E, f.deg_V, f.h_V);
  return {E, f, v, derive_constants(E.N(), default_base_constants(E))};
}

ScanOptions planted_options() {
  ScanOptions o;
  o.max_degree = 36;
  o.max_order = 2;
  return o;
}

const ScanResult& instance1_scan() {
  static const Instance inst = load_instance(1);
  static const ScanResult res = scan(inst.v, inst.curve, planted_options(), inst.ledger);
  return res;
}

AbelianSubvariety from_rows(const CurveSpec& E, const std::vector<IntVec>& rows) {
  return AbelianSubvariety(EndModule(E), rows);
}

}  // namespace

TEST_CASE("planted translate is recovered with its structure") {
  Instance inst = load_instance(1);
  const ScanResult& res = instance1_scan();
  REQUIRE(res.complete);
  AbelianSubvariety H = from_rows(inst.curve, inst.file.planted->H);
  AbelianSubvariety B = from_rows(inst.curve, inst.file.planted->minimal_B);

  int type4 = 0;
  for (const auto& r : res.records) {
    CHECK(r.anomalous);
    CHECK((r.relative_codim == 0 || r.relative_codim == 1));
    if (r.type != 4) continue;
    ++type4;
    CHECK(r.is_maximal);
    CHECK(r.relative_codim == 1);
    CHECK(r.component.est_dim == 1);
    REQUIRE(r.component.translate_structure);
    CHECK(r.component.translate_structure->H.key() == H.key());
    REQUIRE(r.minimal_B);
    CHECK(r.minimal_B->base.key() == B.key());
    CHECK(r.component.certification == Certification::exact);
    REQUIRE(r.component.translate_structure->p);
    CHECK(point_on_coset(*r.component.translate_structure->p, *r.minimal_B, inst.curve));
    CHECK(r.bound_check.verdict == BoundVerdict::passes);
    CHECK(r.bound_check.degree_ok);
  }
  CHECK(type4 == 1);
}

TEST_CASE("hhat(p1) matches the projection oracle") {
  // H = e1 + e2 and p = (O, T, Q): the projection of p to H-perp is
  // (-T/2, T/2, Q), whose height is hhat(Q).
  Instance inst = load_instance(1);
  const ScanResult& res = instance1_scan();
  CurvePoint Q = inst.file.planted->p.factors[2];
  double oracle = neron_tate(Q, inst.curve).value;
  for (const auto& r : res.records)
    if (r.type == 4) CHECK(std::abs(r.bound_check.hhat_p1 - oracle) < 1e-9);
}

TEST_CASE("torsion points on the translate are not maximal") {
  const ScanResult& res = instance1_scan();
  int points = 0;
  for (const auto& r : res.records)
    if (r.component.est_dim == 0) {
      ++points;
      CHECK(r.type == 3);
      CHECK_FALSE(r.is_maximal);
    }
  CHECK(points > 0);
}

TEST_CASE("maximality filter on small record sets") {
  Instance inst = load_instance(1);
  const ScanResult& res = instance1_scan();
  CosetEnumeration cosets = enumerate_torsion_cosets(inst.curve, 36, 2);
  ScanContext ctx(inst.v, inst.curve, cosets, 2, 128, 1);
  std::vector<AnomalyRecord> translate, points;
  for (const auto& r : res.records) (r.type == 4 ? translate : points).push_back(r);
  REQUIRE(translate.size() == 1);
  REQUIRE(points.size() >= 2);

  auto single = maximality_filter(ctx, {points[0]});
  CHECK(single[0].is_maximal);

  auto pair = maximality_filter(ctx, {points[0], points[1]});
  CHECK(pair[0].is_maximal);
  CHECK(pair[1].is_maximal);

  auto nested = maximality_filter(ctx, {points[0], translate[0]});
  CHECK_FALSE(nested[0].is_maximal);
  CHECK(nested[1].is_maximal);
}

TEST_CASE("pullback on the minimal coset finds the translate") {
  Instance inst = load_instance(1);
  CosetEnumeration cosets = enumerate_torsion_cosets(inst.curve, 36, 2);
  ScanContext ctx(inst.v, inst.curve, cosets, 2, 128, 1);
  const ScanResult& res = instance1_scan();
  const TorsionCoset* B = nullptr;
  for (const auto& r : res.records)
    if (r.type == 4) B = &*r.minimal_B;
  REQUIRE(B);
  auto comps = pullback_intersection(ctx, *B);
  bool found = false;
  for (const auto& c : comps)
    if (c.kind == ComponentKind::translate && c.est_dim == 1) found = true;
  CHECK(found);
}

TEST_CASE("classify by the codimension inequality") {
  Instance inst = load_instance(1);
  CosetEnumeration cosets = enumerate_torsion_cosets(inst.curve, 36, 2);
  ScanContext ctx(inst.v, inst.curve, cosets, 2, 128, 1);
  const ScanResult& res = instance1_scan();
  for (const auto& r : res.records) {
    if (!r.minimal_B) continue;
    AnomalyRecord again = classify(ctx, r.component);
    CHECK(again.type == r.type);
    CHECK(again.relative_codim == r.relative_codim);
    // codim Y < codim V + codim B.
    int N = inst.curve.N();
    CHECK(N - r.component.est_dim < 2 + N - r.minimal_B->dim());
  }
}

TEST_CASE("verify_bound semantics") {
  Instance inst = load_instance(1);
  const ScanResult& res = instance1_scan();
  const AnomalyRecord* t = nullptr;
  for (const auto& r : res.records)
    if (r.type == 4) t = &r;
  REQUIRE(t);

  BoundCheck ok = verify_bound(*t, res.bounds, res.ledger, inst.curve);
  CHECK(ok.verdict == BoundVerdict::passes);
  CHECK(ok.passes_at_minimal_inputs);

  BoundReport tight = res.bounds;
  tight.deg_Y_bound = 1;
  BoundCheck deg = verify_bound(*t, tight, res.ledger, inst.curve);
  CHECK(deg.verdict == BoundVerdict::fails);
  CHECK_FALSE(deg.degree_ok);

  BoundReport low = res.bounds;
  low.log_hhat_p1_bound = std::log(ok.hhat_p1 / 2);
  low.hhat_p1_bound = ok.hhat_p1 / 2;
  CHECK(verify_bound(*t, low, res.ledger, inst.curve).verdict == BoundVerdict::fails);

  for (const auto& r : res.records)
    if (r.type != 4) CHECK(r.bound_check.verdict == BoundVerdict::not_applicable);
}

TEST_CASE("scan is deterministic and independent of the coset order") {
  Instance inst = load_instance(1);
  std::string first = scan_report(instance1_scan(), inst.curve, inst.v, planted_options()).dump();
  ScanResult again = scan(inst.v, inst.curve, planted_options(), inst.ledger);
  CHECK(scan_report(again, inst.curve, inst.v, planted_options()).dump() == first);

  ScanOptions shuffled = planted_options();
  shuffled.order_seed = 99;
  ScanResult perm = scan(inst.v, inst.curve, shuffled, inst.ledger);
  REQUIRE(perm.records.size() == again.records.size());
  for (std::size_t i = 0; i < perm.records.size(); ++i)
    CHECK(to_json(perm.records[i]).dump() == to_json(again.records[i]).dump());
}

TEST_CASE("scan input validation") {
  Instance inst = load_instance(1);
  ScanOptions o = planted_options();
  o.max_order = 0;
  CHECK_THROWS_AS(scan(inst.v, inst.curve, o, inst.ledger), DomainError);
  CurveSpec E4(-43, 42, 4);
  CHECK_THROWS_AS(scan(inst.v, inst.curve, planted_options(), derive_constants(4, default_base_constants(E4))),
                  DomainError);
}
