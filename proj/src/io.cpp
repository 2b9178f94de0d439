#include "tat/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tat/errors.hpp"

namespace tat {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

mpz_class parse_int(const KeyValue& kv, const std::string& source, const std::string& text) {
  mpz_class z;
  if (text.empty() || z.set_str(text, 10) != 0) throw ParseError(source, kv.line, "expected an integer for " + kv.key);
  return z;
}

mpz_class parse_int(const KeyValue& kv, const std::string& source) { return parse_int(kv, source, kv.value); }

double parse_real(const KeyValue& kv, const std::string& source) {
  try {
    std::size_t pos = 0;
    double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(source, kv.line, "expected a real number for " + kv.key);
  }
}

mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational '" + s + "'");
  q.canonicalize();
  return q;
}

std::vector<IntVec> parse_rows(const KeyValue& kv, const std::string& source) {
  std::vector<IntVec> rows;
  for (const auto& r : split(kv.value, ';')) {
    IntVec row;
    for (const auto& e : split(r, ',')) row.push_back(parse_int(kv, source, e));
    rows.push_back(row);
  }
  return rows;
}

Json real_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string to_decimal(const mpz_class& z) { return z.get_str(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& source) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected 'key = value'");
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), n};
    if (kv.key.empty()) throw ParseError(source, n, "empty key");
    if (kv.value.empty()) throw ParseError(source, n, "empty value for " + kv.key);
    if (!seen.insert(kv.key).second) throw ParseError(source, n, "repeated key " + kv.key);
    out.push_back(kv);
  }
  return out;
}

CurveSpec parse_curve(const std::string& text, const std::string& source) {
  std::optional<mpz_class> A, B;
  int N = 1;
  std::optional<CmOrder> cm;
  int last = 0;
  for (const auto& kv : parse_key_values(text, source)) {
    last = kv.line;
    if (kv.key == "A") {
      A = parse_int(kv, source);
    } else if (kv.key == "B") {
      B = parse_int(kv, source);
    } else if (kv.key == "N") {
      mpz_class n = parse_int(kv, source);
      if (n < 1 || n > 12) throw ParseError(source, kv.line, "N must be between 1 and 12");
      N = static_cast<int>(n.get_si());
    } else if (kv.key == "cm") {
      auto parts = split(kv.value, ',');
      if (parts.size() < 2 || parts.size() > 3) throw ParseError(source, kv.line, "cm expects trace,norm[,sign]");
      CmOrder o;
      o.trace = parse_int(kv, source, parts[0]).get_si();
      o.norm = parse_int(kv, source, parts[1]).get_si();
      if (parts.size() == 3) o.sign = parse_int(kv, source, parts[2]) < 0 ? -1 : 1;
      if (o.discriminant() >= 0) throw ParseError(source, kv.line, "cm order must be imaginary quadratic");
      cm = o;
    } else {
      throw ParseError(source, kv.line, "unknown key " + kv.key);
    }
  }
  if (!A || !B) throw ParseError(source, last, "curve file needs A and B");
  try {
    return CurveSpec(*A, *B, N, cm);
  } catch (const DomainError& e) {
    throw ParseError(source, last, e.what());
  }
}

CurveSpec load_curve(const std::string& path) { return parse_curve(read_file(path), path); }

CurvePoint parse_curve_point(const std::string& text) {
  std::string t = trim(text);
  if (t == "O" || t == "0") return CurvePoint::identity();
  if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  auto parts = split(t, ',');
  if (parts.size() != 2) throw std::invalid_argument("point must be 'x,y' or 'O'");
  return CurvePoint(QuadElem(parse_rational(parts[0])), QuadElem(parse_rational(parts[1])));
}

AmbientPoint parse_ambient_point(const std::string& text) {
  AmbientPoint p;
  for (const auto& f : split(text, ';')) p.factors.push_back(parse_curve_point(f));
  return p;
}

std::string format_ambient_point(const AmbientPoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.factors.size(); ++i) {
    if (i) s += "; ";
    const auto& f = p.factors[i];
    s += f.is_identity ? "O" : f.x.to_string() + "," + f.y.to_string();
  }
  return s;
}

VarietyFile parse_variety(const std::string& text, const std::string& source) {
  VarietyFile v;
  std::map<std::string, KeyValue> kvs;
  int last = 0;
  for (const auto& kv : parse_key_values(text, source)) {
    static const std::set<std::string> known = {"N", "f1", "f2", "deg_V", "h_V", "planted.H", "planted.p", "planted.B"};
    if (!known.count(kv.key)) throw ParseError(source, kv.line, "unknown key " + kv.key);
    kvs[kv.key] = kv;
    last = kv.line;
  }
  if (!kvs.count("N")) throw ParseError(source, last, "variety file needs N");
  mpz_class n = parse_int(kvs["N"], source);
  if (n < 2 || n > 12) throw ParseError(source, kvs["N"].line, "N must be between 2 and 12");
  v.N = static_cast<int>(n.get_si());
  if (!kvs.count("h_V")) throw ParseError(source, last, "variety file needs h_V");
  v.h_V = parse_real(kvs["h_V"], source);
  if (!(v.h_V >= 0)) throw ParseError(source, kvs["h_V"].line, "h_V must be nonnegative");
  if (kvs.count("deg_V")) {
    v.deg_V = parse_int(kvs["deg_V"], source);
    if (*v.deg_V < 1) throw ParseError(source, kvs["deg_V"].line, "deg_V must be positive");
  }
  if (kvs.count("f1") != kvs.count("f2")) throw ParseError(source, last, "give both f1 and f2 or neither");
  if (kvs.count("f1")) {
    auto names = affine_variable_names(v.N);
    std::array<MultiPoly, 2> eqs;
    for (int j = 0; j < 2; ++j) {
      const KeyValue& kv = kvs[j == 0 ? "f1" : "f2"];
      v.equation_text[j] = kv.value;
      try {
        eqs[j] = parse_polynomial(kv.value, names);
      } catch (const std::exception& e) {
        throw ParseError(source, kv.line, kv.key + ": " + e.what());
      }
    }
    v.equations = eqs;
  } else if (!v.deg_V) {
    throw ParseError(source, last, "deg_V is required when the equations are absent");
  }
  if (kvs.count("planted.H") || kvs.count("planted.p") || kvs.count("planted.B")) {
    if (!kvs.count("planted.H") || !kvs.count("planted.p") || !kvs.count("planted.B"))
      throw ParseError(source, last, "planted.H, planted.p and planted.B go together");
    PlantedStructure ps;
    ps.H = parse_rows(kvs["planted.H"], source);
    ps.minimal_B = parse_rows(kvs["planted.B"], source);
    try {
      ps.p = parse_ambient_point(kvs["planted.p"].value);
    } catch (const std::exception& e) {
      throw ParseError(source, kvs["planted.p"].line, e.what());
    }
    if (ps.p.size() != v.N) throw ParseError(source, kvs["planted.p"].line, "planted.p has the wrong number of factors");
    v.planted = ps;
  }
  return v;
}

VarietyFile load_variety(const std::string& path) { return parse_variety(read_file(path), path); }

ConstantsFile parse_constants(const std::string& text, const std::string& source, const BaseConstants& defaults) {
  ConstantsFile c;
  c.base = defaults;
  ProvenancedConstant* slots[5] = {&c.base.c1, &c.base.c2, &c.base.c3, &c.base.c4, &c.base.c5};
  std::map<std::string, std::string> provenance;
  for (const auto& kv : parse_key_values(text, source)) {
    bool handled = false;
    if (kv.key == "N") {
      mpz_class n = parse_int(kv, source);
      if (n < 1 || n > 12) throw ParseError(source, kv.line, "N must be between 1 and 12");
      c.N = static_cast<int>(n.get_si());
      handled = true;
    }
    for (int i = 0; i < 5; ++i) {
      std::string name = "c" + std::to_string(i + 1);
      if (kv.key == name) {
        double x = parse_real(kv, source);
        if (!(x > 0) || !std::isfinite(x)) throw ParseError(source, kv.line, name + " must be positive and finite");
        slots[i]->value = x;
        slots[i]->provenance = "user";
        handled = true;
      } else if (kv.key == name + ".provenance") {
        provenance[name] = kv.value;
        handled = true;
      }
    }
    for (const char* k : {"c6", "c7", "c8", "c9", "c10", "C"})
      if (kv.key == k) {
        c.expected.emplace_back(kv.key, parse_real(kv, source));
        handled = true;
      }
    if (!handled) throw ParseError(source, kv.line, "unknown key " + kv.key);
  }
  for (int i = 0; i < 5; ++i) {
    std::string name = "c" + std::to_string(i + 1);
    if (provenance.count(name) && slots[i]->provenance == "user") slots[i]->provenance = "user: " + provenance[name];
  }
  return c;
}

ConstantsFile load_constants(const std::string& path, const BaseConstants& defaults) {
  return parse_constants(read_file(path), path, defaults);
}

Json make_report(const std::string& kind) {
  Json j;
  j["report"] = kind;
  j["schema_version"] = 1;
  return j;
}

Json to_json(const CurveSpec& curve) {
  Json j;
  j["A"] = curve.A().get_str();
  j["B"] = curve.B().get_str();
  j["N"] = curve.N();
  j["discriminant"] = curve.discriminant().get_str();
  j["j_invariant"] = curve.j_invariant().get_str();
  if (curve.cm()) {
    j["cm"] = {{"trace", curve.cm()->trace}, {"norm", curve.cm()->norm}, {"sign", curve.cm()->sign}};
  } else {
    j["cm"] = nullptr;
  }
  return j;
}

Json to_json(const ConstantsLedger& l) {
  Json j;
  j["N"] = l.N;
  auto pc = [](const ProvenancedConstant& c) { return Json{{"value", c.value}, {"provenance", c.provenance}}; };
  j["c1"] = pc(l.c1);
  j["c2"] = pc(l.c2);
  j["c3"] = pc(l.c3);
  j["c4"] = pc(l.c4);
  j["c5"] = pc(l.c5);
  j["c6"] = real_or_null(l.c6);
  j["c7"] = real_or_null(l.c7);
  j["c8"] = real_or_null(l.c8);
  j["c9"] = real_or_null(l.c9);
  j["c10"] = real_or_null(l.c10);
  j["C"] = real_or_null(l.C);
  return j;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["deg_V"] = r.deg_V.get_str();
  j["h_V"] = r.h_V;
  j["dim_V"] = r.dim_V;
  j["T"] = real_or_null(r.T);
  j["hhat_p1_bound"] = real_or_null(r.hhat_p1_bound);
  j["log_hhat_p1_bound"] = real_or_null(r.log_hhat_p1_bound);
  j["h_Y_bound"] = real_or_null(r.h_Y_bound);
  j["log_h_Y_bound"] = real_or_null(r.log_h_Y_bound);
  j["deg_Y_bound"] = r.deg_Y_bound.get_str();
  return j;
}

Json to_json(const AbelianSubvariety& b) {
  Json j;
  j["dim"] = b.dim();
  j["degree"] = degree(b).get_str();
  Json rows = Json::array();
  int r = b.module().rank();
  for (const auto& row : b.canonical_form()) {
    Json jr = Json::array();
    for (std::size_t i = 0; i < row.size(); i += r) {
      if (r == 1)
        jr.push_back(row[i].get_si());
      else
        jr.push_back(Json::array({row[i].get_si(), row[i + 1].get_si()}));
    }
    rows.push_back(jr);
  }
  j["canonical_form"] = rows;
  return j;
}

Json to_json(const TorsionCoset& c) {
  Json j;
  j["base"] = to_json(c.base);
  Json z = Json::array();
  for (const auto& q : c.zeta) z.push_back(q.get_str());
  j["zeta"] = z;
  j["order"] = c.order;
  j["dim"] = c.dim();
  return j;
}

Json to_json(const AmbientPoint& p) {
  Json a = Json::array();
  for (const auto& f : p.factors) {
    if (f.is_identity)
      a.push_back("O");
    else
      a.push_back(Json::array({f.x.to_string(), f.y.to_string()}));
  }
  return a;
}

Json to_json(const AnomalyRecord& r) {
  Json j;
  j["type"] = r.type;
  j["relative_codim"] = r.relative_codim;
  j["anomalous"] = r.anomalous;
  j["is_maximal"] = r.is_maximal;
  j["maximality_scope"] = "within scan bounds";
  j["resolved"] = r.resolved;
  j["minimal_B"] = r.minimal_B ? to_json(*r.minimal_B) : Json(nullptr);
  const auto& c = r.component;
  Json comp;
  comp["kind"] = to_string(c.kind);
  comp["est_dim"] = c.est_dim;
  comp["certification"] = to_string(c.certification);
  comp["coset"] = to_json(c.coset);
  Json ws = Json::array();
  for (const auto& w : c.witnesses) {
    Json wj;
    wj["coordinates"] = w.coords;
    wj["radius"] = w.radius;
    wj["exact"] = w.exact ? to_json(*w.exact) : Json(nullptr);
    ws.push_back(wj);
  }
  comp["witnesses"] = ws;
  if (c.translate_structure) {
    Json t;
    t["H"] = to_json(c.translate_structure->H);
    t["p"] = c.translate_structure->p ? to_json(*c.translate_structure->p) : Json(nullptr);
    comp["translate"] = t;
  } else {
    comp["translate"] = nullptr;
  }
  j["component"] = comp;
  const auto& b = r.bound_check;
  j["bound_check"] = {{"verdict", to_string(b.verdict)},
                      {"hhat_p1", b.hhat_p1},
                      {"hhat_p1_radius", b.hhat_p1_radius},
                      {"degree_ok", b.degree_ok},
                      {"passes_at_minimal_inputs", b.passes_at_minimal_inputs},
                      {"note", b.note}};
  return j;
}

Json to_json(const ApproximationResult& r) {
  Json j;
  j["H"] = to_json(r.H);
  j["degree"] = r.degree.get_str();
  j["height"] = real_or_null(r.height);
  j["muhat_upper"] = real_or_null(r.muhat_upper);
  j["theorem_bound"] = real_or_null(r.theorem_bound);
  j["meets_bound"] = r.meets_bound;
  j["candidates"] = r.candidates;
  j["complete"] = r.complete;
  return j;
}

Json scan_report(const ScanResult& res, const CurveSpec& curve, const VarietyModel& v, const ScanOptions& opt) {
  Json j = make_report("scan");
  j["curve"] = to_json(curve);
  Json vj;
  vj["N"] = v.N;
  auto names = affine_variable_names(v.N);
  vj["equations"] = {v.equations[0].to_string(names), v.equations[1].to_string(names)};
  vj["deg_V"] = v.deg_V.get_str();
  vj["deg_V_source"] = to_string(v.deg_source);
  vj["h_V"] = v.h_V;
  vj["dim_V"] = v.dim_V;
  j["variety"] = vj;
  j["options"] = {{"max_degree", opt.max_degree.get_str()},
                  {"max_order", opt.max_order},
                  {"precision_bits", opt.precision_bits},
                  {"seed", opt.seed},
                  {"budget", opt.budget.max_steps}};
  j["complete"] = res.complete;
  j["cosets_scanned"] = res.cosets_scanned;
  j["torsion_points_scanned"] = res.torsion_points_scanned;
  j["ledger"] = to_json(res.ledger);
  j["bounds"] = to_json(res.bounds);
  Json recs = Json::array();
  for (const auto& r : res.records) recs.push_back(to_json(r));
  j["records"] = recs;
  return j;
}

std::string scan_csv(const ScanResult& res) {
  std::ostringstream os;
  os << "type,relative_codim,maximal,est_dim,kind,minimal_B,H,verdict,hhat_p1\n";
  for (const auto& r : res.records) {
    os << r.type << ',' << r.relative_codim << ',' << (r.is_maximal ? 1 : 0) << ',' << r.component.est_dim << ','
       << to_string(r.component.kind) << ",\"" << (r.minimal_B ? r.minimal_B->key() : "") << "\",\""
       << (r.component.translate_structure ? r.component.translate_structure->H.key() : "") << "\","
       << to_string(r.bound_check.verdict) << ',' << r.bound_check.hhat_p1 << '\n';
  }
  return os.str();
}

}  // namespace tat
