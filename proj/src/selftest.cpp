#include "tat/selftest.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "tat/abelian.hpp"
#include "tat/bounds.hpp"
#include "tat/errors.hpp"
#include "tat/heights.hpp"
#include "tat/io.hpp"

namespace tat {

namespace {

class CapScope {
 public:
  explicit CapScope(int bits) : saved_(set_height_precision_cap(bits)) {}
  ~CapScope() { set_height_precision_cap(saved_); }
  CapScope(const CapScope&) = delete;
  CapScope& operator=(const CapScope&) = delete;

 private:
  int saved_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Tightest target radius in {1e-12, 1.6e-11, ...} that fits under the cap.
double neron_tate_retrying(const CurvePoint& p, const CurveSpec& curve, double& retries, bool& exhausted) {
  for (double target = 1e-12; target <= 1e-7; target *= 16) {
    try {
      return neron_tate(p, curve, target).value;
    } catch (const PrecisionError&) {
      retries += 1;
    }
  }
  exhausted = true;
  return 0.0;
}

}  // namespace

SuiteResult heights_suite(const SelftestOptions& opt) {
  SuiteResult r;
  r.name = "heights";
  CapScope cap(opt.precision_cap_bits);
  const CurveSpec curves[] = {CurveSpec(-43, 42), CurveSpec(-16, 16), CurveSpec(-7, 10)};
  double points = 0, torsion = 0, retries = 0, exhausted = 0;
  const double tol = 1e-6;
  for (const auto& E : curves) {
    auto pts = search_rational_points(E, 30, 3);
    if (pts.size() > 10) pts.resize(10);
    for (const auto& P : pts) {
      points += 1;
      bool ex = false;
      // h <= h2 <= h + (1/2) log 3 for [x : y : 1].
      double h = weil_height(P).value, h2 = normalized_height_point(P).value;
      if (h > h2 + 1e-12 || h2 > h + 0.5 * std::log(3.0) + 1e-12)
        r.failures.push_back("Weil comparison fails at " + P.to_string());
      double hp = neron_tate_retrying(P, E, retries, ex);
      if (exact_order(P, E) > 0) {
        torsion += 1;
        if (!ex && hp > tol) r.failures.push_back("torsion point " + P.to_string() + " has height " + fmt(hp));
      } else {
        for (int k = 2; k <= 3 && !ex; ++k) {
          double hk = neron_tate_retrying(scalar_mul(mpz_class(k), P, E), E, retries, ex);
          if (!ex && std::abs(hk - k * k * hp) > tol)
            r.failures.push_back("quadraticity fails at " + P.to_string() + ", k = " + std::to_string(k));
        }
      }
      if (ex) {
        exhausted += 1;
        r.failures.push_back("precision cap exhausted at " + P.to_string());
      }
    }
  }
  r.stats = {{"points", points}, {"torsion_points", torsion}, {"precision_retries", retries},
             {"precision_exhausted", exhausted}};
  r.passed = r.failures.empty() && points > 0;
  return r;
}

SuiteResult enumeration_suite(const SelftestOptions&) {
  SuiteResult r;
  r.name = "enumeration";
  double cases = 0;
  {
    CurveSpec E(-43, 42, 2);
    EndModule m(E);
    for (long D : {3L, 6L, 12L, 30L}) {
      cases += 1;
      // Lines of E^2 are spanned by primitive (a, b), degree 3(a^2 + b^2).
      std::set<std::string> oracle;
      for (long a = 0; 3 * a * a <= D; ++a)
        for (long b = -a - 10; b <= a + 10; ++b) {
          if (3 * (a * a + b * b) > D || std::gcd(a, b) != 1) continue;
          if (a == 0 && b != 1) continue;
          oracle.insert(AbelianSubvariety(m, {{mpz_class(a), mpz_class(b)}}).key());
        }
      std::set<std::string> got;
      auto res = enumerate_subvarieties(E, D);
      for (const auto& b : res.items) got.insert(b.key());
      if (!res.complete || got != oracle)
        r.failures.push_back("E^2 enumeration differs from the oracle at max_degree " + std::to_string(D));
    }
  }
  {
    CurveSpec E(-1, 0, 2, CmOrder{0, 1, 1});
    EndModule m(E);
    cases += 1;
    // Z[i]-lines: primitive (u1, u2) up to units, degree 3(|u1|^2 + |u2|^2).
    std::set<std::string> oracle;
    for (long a = -3; a <= 3; ++a)
      for (long b = -3; b <= 3; ++b)
        for (long c = -3; c <= 3; ++c)
          for (long d = -3; d <= 3; ++d) {
            long n = a * a + b * b + c * c + d * d;
            if (n == 0 || 3 * n > 9) continue;
            AbelianSubvariety x(m, {{mpz_class(a), mpz_class(b), mpz_class(c), mpz_class(d)}});
            if (degree(x) <= 9) oracle.insert(x.key());
          }
    std::set<std::string> got;
    for (const auto& b : enumerate_subvarieties(E, 9).items) got.insert(b.key());
    if (got != oracle) r.failures.push_back("CM enumeration differs from the oracle at max_degree 9");
  }
  r.stats = {{"cases", cases}};
  r.passed = r.failures.empty();
  return r;
}

SuiteResult ledger_suite(const SelftestOptions& opt) {
  SuiteResult r;
  r.name = "ledger";
  int N = 3;
  ConstantsFile file;
  try {
    if (opt.constants_path) {
      CurveSpec E(-43, 42, 1);
      ConstantsFile probe = load_constants(*opt.constants_path, default_base_constants(E));
      N = probe.N.value_or(3);
      file = load_constants(*opt.constants_path, default_base_constants(E.with_power(N)));
    } else {
      file.base = default_base_constants(CurveSpec(-43, 42, N));
    }
  } catch (const std::exception& e) {
    r.failures.push_back(e.what());
    return r;
  }
  ConstantsLedger l = derive_constants(N, file.base);
  double c1 = l.c1.value, c2 = l.c2.value, c3 = l.c3.value, c4 = l.c4.value, c5 = l.c5.value;
  double c6 = std::ldexp(1.0, N);
  double c7 = std::max(1.0, c4 * c6 * (N + 1));
  double c8 = c5 * c6;
  double c9 = c3 * c6 * ((3 * c2 + c1) * (N + 1) + std::pow(3.0, N) * std::log(2.0) / 2);
  double c10 = c3 * c5 * c6;
  double C = 0.5 * std::pow(c7, N - 1) * (std::max(c9, c10) + c5 * c6 + 3 * c2);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  std::pair<const char*, std::pair<double, double>> checks[] = {
      {"c6", {l.c6, c6}}, {"c7", {l.c7, c7}}, {"c8", {l.c8, c8}},
      {"c9", {l.c9, c9}}, {"c10", {l.c10, c10}}, {"C", {l.C, C}}};
  for (const auto& [name, v] : checks)
    if (!close(v.first, v.second)) r.failures.push_back(std::string(name) + " differs from the recomputation");
  for (int n = 1; n <= 6; ++n)
    if (derive_constants(n, file.base).c6 != std::ldexp(1.0, n)) r.failures.push_back("c6 != 2^N");
  for (long d = 1; d <= 50; ++d)
    if (!(choose_T(l, d) >= 1)) r.failures.push_back("choose_T < 1 at deg_V " + std::to_string(d));
  for (const auto& [name, value] : file.expected) {
    double got = 0;
    for (const auto& [n, v] : checks)
      if (name == n) got = v.first;
    if (!close(got, value))
      r.failures.push_back("constants file expects " + name + " = " + fmt(value) + ", derived " + fmt(got));
  }
  r.stats = {{"N", N}, {"expected_values", static_cast<double>(file.expected.size())}};
  r.passed = r.failures.empty();
  return r;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt) {
  return {heights_suite(opt), enumeration_suite(opt), ledger_suite(opt)};
}

}  // namespace tat
