#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "tat/anomaly.hpp"
#include "tat/errors.hpp"
#include "tat/heights.hpp"
#include "tat/io.hpp"
#include "tat/selftest.hpp"

using namespace tat;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, truncated = 3, precision = 4, selftest_failed = 5 };

struct Options {
  std::string curve, variety, constants, out, format = "json";
  std::string max_degree = "12";
  int max_order = 1;
  int precision_bits = 128;
  std::uint64_t seed = 1;
  std::vector<std::string> points;
  std::string point;
  std::vector<double> T{1, 4, 16};
  int k = 2, s = 1;
  long search_bound = 20;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Budget budget_from_env() {
  Budget b;
  if (const char* env = std::getenv("TAT_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw UsageError("TAT_BUDGET must be a positive integer");
    b.max_steps = v;
  }
  return b;
}

mpz_class parse_degree(const std::string& s) {
  mpz_class d;
  if (d.set_str(s, 10) != 0 || d < 1) throw UsageError("--max-degree must be a positive integer");
  return d;
}

void emit(const Json& j, const Options& o) {
  std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot write " + o.out);
  f << text;
}

ConstantsLedger load_ledger(const Options& o, const CurveSpec& curve) {
  BaseConstants base = default_base_constants(curve);
  if (!o.constants.empty()) {
    ConstantsFile f = load_constants(o.constants, base);
    if (f.N && *f.N != curve.N()) throw UsageError("constants file is for N = " + std::to_string(*f.N));
    base = f.base;
  }
  return derive_constants(curve.N(), base);
}

struct LoadedVariety {
  CurveSpec curve;
  VarietyFile file;
};

LoadedVariety load_inputs(const Options& o) {
  if (o.curve.empty()) throw UsageError("--curve is required");
  if (o.variety.empty()) throw UsageError("--variety is required");
  CurveSpec c = load_curve(o.curve);
  VarietyFile v = load_variety(o.variety);
  return {c.with_power(v.N), v};
}

Json variety_json(const VarietyFile& f, const mpz_class& deg_V, DegreeSource src, int N) {
  Json v;
  v["N"] = N;
  if (f.equations)
    v["equations"] = {f.equation_text[0], f.equation_text[1]};
  else
    v["equations"] = nullptr;
  v["deg_V"] = deg_V.get_str();
  v["deg_V_source"] = to_string(src);
  v["h_V"] = f.h_V;
  v["dim_V"] = N - 2;
  return v;
}

int cmd_bound(const Options& o) {
  auto [curve, file] = load_inputs(o);
  mpz_class deg_V;
  DegreeSource src = DegreeSource::user;
  if (file.deg_V) {
    deg_V = *file.deg_V;
  } else {
    deg_V = degree_upper_bound(*file.equations, curve);
    src = DegreeSource::pole_bound;
  }
  ConstantsLedger ledger = load_ledger(o, curve);
  BoundReport b = effective_bounds(ledger, deg_V, file.h_V, curve.N() - 2);
  Json j = make_report("bound");
  j["curve"] = to_json(curve);
  j["variety"] = variety_json(file, deg_V, src, curve.N());
  j["constants"] = to_json(ledger);
  j["bounds"] = to_json(b);
  emit(j, o);
  if (!o.out.empty())
    std::cout << "C = " << ledger.C << "  T = " << b.T << "  log hhat(p1) bound = " << b.log_hhat_p1_bound
              << "  deg Y bound = " << b.deg_Y_bound.get_str() << "\n";
  return ok;
}

int cmd_scan(const Options& o) {
  auto [curve, file] = load_inputs(o);
  if (!file.equations) throw UsageError("scan needs a variety file with equations f1 and f2");
  VarietyModel v = make_variety(*file.equations, curve, file.deg_V, file.h_V, o.seed);
  ScanOptions opt;
  opt.max_degree = parse_degree(o.max_degree);
  opt.max_order = o.max_order;
  opt.precision_bits = o.precision_bits;
  opt.seed = o.seed;
  opt.budget = budget_from_env();
  ConstantsLedger ledger = load_ledger(o, curve);
  ScanResult res = scan(v, curve, opt, ledger);
  if (o.format == "csv") {
    std::string text = scan_csv(res);
    if (o.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(o.out);
      if (!f) throw UsageError("cannot write " + o.out);
      f << text;
    }
  } else {
    emit(scan_report(res, curve, v, opt), o);
  }
  if (!o.out.empty()) {
    for (const auto& r : res.records)
      std::cout << "type " << r.type << "  relative_codim " << r.relative_codim << "  dim " << r.component.est_dim
                << "  " << (r.is_maximal ? "maximal" : "contained") << "  B " << (r.minimal_B ? r.minimal_B->key() : "?")
                << "  bound " << to_string(r.bound_check.verdict) << "\n";
    std::cout << res.records.size() << " records, " << res.cosets_scanned << " cosets, "
              << res.torsion_points_scanned << " torsion points" << (res.complete ? "" : ", truncated by budget")
              << "\n";
  }
  return res.complete ? ok : truncated;
}

int cmd_enumerate(const Options& o, bool with_cosets) {
  if (o.curve.empty()) throw UsageError("--curve is required");
  CurveSpec curve = load_curve(o.curve);
  mpz_class D = parse_degree(o.max_degree);
  Budget budget = budget_from_env();
  auto subs = enumerate_subvarieties(curve, D, budget);
  Json j = make_report("enumerate");
  j["curve"] = to_json(curve);
  j["max_degree"] = D.get_str();
  j["complete"] = subs.complete;
  Json items = Json::array();
  for (const auto& b : subs.items) items.push_back(to_json(b));
  j["subvarieties"] = items;
  bool complete = subs.complete;
  if (with_cosets) {
    auto cosets = enumerate_torsion_cosets(curve, D, o.max_order, budget);
    Json cs = Json::array();
    for (const auto& c : cosets.items) cs.push_back(to_json(c));
    j["max_order"] = o.max_order;
    j["cosets"] = cs;
    complete = complete && cosets.complete;
    j["complete"] = complete;
  }
  emit(j, o);
  return complete ? ok : truncated;
}

int cmd_heights(const Options& o, bool capped) {
  if (o.curve.empty()) throw UsageError("--curve is required");
  CurveSpec curve = load_curve(o.curve);
  std::vector<AmbientPoint> pts;
  for (const auto& s : o.points) {
    try {
      pts.push_back(parse_ambient_point(s));
    } catch (const std::exception& e) {
      throw UsageError("bad point '" + s + "': " + e.what());
    }
  }
  bool searched = pts.empty();
  if (searched) {
    auto found = search_rational_points(curve.with_power(1), o.search_bound, 1);
    if (found.size() > 10) found.resize(10);
    for (const auto& p : found) pts.push_back(AmbientPoint{{p}});
  }
  int saved = set_height_precision_cap(capped ? o.precision_bits : 0);
  Json items = Json::array();
  try {
    for (const auto& p : pts) {
      CurveSpec E = curve.with_power(p.size());
      for (const auto& f : p.factors)
        if (!on_curve(f, E)) throw UsageError("point " + f.to_string() + " is not on the curve");
      HeightValue w = weil_height(p), n = normalized_height_point(p), nt = neron_tate(p, E);
      Interval conv = convert_heights(n, HeightKind::neron_tate, default_conversion_constants(E));
      Json pj;
      pj["point"] = to_json(p);
      pj["weil"] = {{"value", w.value}, {"radius", w.error_radius}};
      pj["normalized"] = {{"value", n.value}, {"radius", n.error_radius}};
      pj["neron_tate"] = {{"value", nt.value}, {"radius", nt.error_radius}};
      pj["neron_tate_from_normalized"] = {{"lower", conv.lower}, {"upper", conv.upper}};
      items.push_back(pj);
    }
  } catch (...) {
    set_height_precision_cap(saved);
    throw;
  }
  set_height_precision_cap(saved);
  Json j = make_report("heights");
  j["curve"] = to_json(curve);
  j["searched"] = searched;
  j["points"] = items;
  emit(j, o);
  return ok;
}

int cmd_approx(const Options& o) {
  if (o.curve.empty()) throw UsageError("--curve is required");
  if (o.point.empty()) throw UsageError("--point is required");
  AmbientPoint p1;
  try {
    p1 = parse_ambient_point(o.point);
  } catch (const std::exception& e) {
    throw UsageError("bad point: " + std::string(e.what()));
  }
  CurveSpec curve = load_curve(o.curve).with_power(p1.size());
  if (curve.N() < 2) throw UsageError("--point needs at least two factors");
  for (const auto& f : p1.factors)
    if (!on_curve(f, curve)) throw UsageError("point " + f.to_string() + " is not on the curve");
  Budget budget = budget_from_env();
  auto cosets = enumerate_torsion_cosets(curve, parse_degree(o.max_degree), o.max_order, budget);
  const TorsionCoset* coset = nullptr;
  for (const auto& c : cosets.items)
    if (c.dim() == 1 && point_on_coset(p1, c, curve, o.precision_bits)) {
      coset = &c;
      break;
    }
  if (!coset) throw SearchError("no 1-dimensional torsion coset within the bounds contains the point");
  ConstantsLedger ledger = load_ledger(o, curve);
  Json j = make_report("approx");
  j["curve"] = to_json(curve);
  j["point"] = to_json(p1);
  j["coset"] = to_json(*coset);
  j["k"] = o.k;
  j["s"] = o.s;
  j["constants"] = to_json(ledger);
  Json runs = Json::array();
  bool complete = cosets.complete;
  for (double T : o.T) {
    ApproximationResult r = approximation_search(p1, *coset, T, o.k, o.s, ledger, curve, budget);
    Json rj;
    rj["T"] = T;
    rj["degree_limit"] = ledger.c3.value * T;
    rj["result"] = to_json(r);
    runs.push_back(rj);
    complete = complete && r.complete;
  }
  j["runs"] = runs;
  emit(j, o);
  return complete ? ok : truncated;
}

int cmd_selftest(const Options& o, bool capped) {
  SelftestOptions so;
  if (!o.constants.empty()) so.constants_path = o.constants;
  if (capped) so.precision_cap_bits = o.precision_bits;
  auto results = run_selftest(so);
  bool all = true;
  Json suites = Json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    std::cout << r.name << ": " << (r.passed ? "PASS" : "FAIL");
    for (const auto& [k, v] : r.stats) std::cout << "  " << k << "=" << v;
    std::cout << "\n";
    for (const auto& f : r.failures) std::cout << "  " << f << "\n";
    Json sj;
    sj["name"] = r.name;
    sj["passed"] = r.passed;
    Json st = Json::object();
    for (const auto& [k, v] : r.stats) st[k] = v;
    sj["stats"] = st;
    sj["failures"] = r.failures;
    suites.push_back(sj);
  }
  if (!o.out.empty()) {
    Json j = make_report("selftest");
    j["passed"] = all;
    j["suites"] = suites;
    emit(j, o);
  }
  return all ? ok : selftest_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Torsion anomalous translates in powers of an elliptic curve"};
  app.require_subcommand(1);
  Options o;

  auto files = [&](CLI::App* c, bool variety) {
    c->add_option("--curve", o.curve, "Curve file")->check(CLI::ExistingFile);
    if (variety) c->add_option("--variety", o.variety, "Variety file")->check(CLI::ExistingFile);
    c->add_option("--constants", o.constants, "Constants file")->check(CLI::ExistingFile);
    c->add_option("--out", o.out, "Output path (default: standard output)");
  };

  auto* bound = app.add_subcommand("bound", "Constants ledger and effective bounds");
  files(bound, true);
  bound->add_option("--format", o.format)->check(CLI::IsMember({"json"}));

  auto* scan_cmd = app.add_subcommand("scan", "Search for torsion anomalous subvarieties");
  files(scan_cmd, true);
  scan_cmd->add_option("--max-degree", o.max_degree, "Largest degree of B0");
  scan_cmd->add_option("--max-order", o.max_order, "Largest torsion order")->check(CLI::Range(1, 12));
  scan_cmd->add_option("--precision-bits", o.precision_bits)->check(CLI::Range(64, 4096));
  scan_cmd->add_option("--seed", o.seed);
  scan_cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));

  auto* enumerate = app.add_subcommand("enumerate", "Abelian subvarieties and torsion cosets");
  files(enumerate, false);
  enumerate->add_option("--max-degree", o.max_degree);
  auto* order_opt = enumerate->add_option("--max-order", o.max_order, "Also list torsion cosets")->check(CLI::Range(1, 12));
  enumerate->add_option("--format", o.format)->check(CLI::IsMember({"json"}));

  auto* heights = app.add_subcommand("heights", "Weil, normalized and Neron-Tate heights");
  files(heights, false);
  heights->add_option("points", o.points, "Points 'x,y' or 'x1,y1; x2,y2; ...' (default: searched)");
  heights->add_option("--search-bound", o.search_bound)->check(CLI::PositiveNumber);
  auto* hprec = heights->add_option("--precision-bits", o.precision_bits, "Precision cap")->check(CLI::Range(64, 20000));
  heights->add_option("--format", o.format)->check(CLI::IsMember({"json"}));

  auto* approx = app.add_subcommand("approx", "Approximation of a point by torsion translates");
  files(approx, false);
  approx->add_option("--point", o.point, "Point 'x1,y1; x2,y2; ...'");
  approx->add_option("--T", o.T, "Values of T")->check(CLI::PositiveNumber);
  approx->add_option("-k", o.k)->check(CLI::PositiveNumber);
  approx->add_option("-s", o.s)->check(CLI::PositiveNumber);
  approx->add_option("--max-degree", o.max_degree);
  approx->add_option("--max-order", o.max_order)->check(CLI::Range(1, 12));
  approx->add_option("--precision-bits", o.precision_bits)->check(CLI::Range(64, 4096));
  approx->add_option("--format", o.format)->check(CLI::IsMember({"json"}));

  auto* selftest = app.add_subcommand("selftest", "Embedded invariant suites");
  selftest->add_option("--constants", o.constants, "Constants file for the ledger suite")->check(CLI::ExistingFile);
  auto* sprec = selftest->add_option("--precision-bits", o.precision_bits, "Precision cap for heights")
                    ->check(CLI::Range(64, 20000));
  selftest->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*bound) return cmd_bound(o);
    if (*scan_cmd) return cmd_scan(o);
    if (*enumerate) return cmd_enumerate(o, order_opt->count() > 0);
    if (*heights) return cmd_heights(o, hprec->count() > 0);
    if (*approx) return cmd_approx(o);
    if (*selftest) return cmd_selftest(o, sprec->count() > 0);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return usage;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return usage;
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return truncated;
  } catch (const PrecisionError& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return precision;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return usage;
}
