// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "svi/certify.hpp"
#include "svi/expression.hpp"
#include "svi/increase.hpp"
#include "svi/slopes.hpp"
#include "svi/spec_io.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace svi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(SVI_FIXTURE_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Collects failed checks for one criterion.
struct Criterion {
  std::vector<std::string> failures;
  std::string summary;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double num(const Json& v) {
  if (v.is_string()) return v.get<std::string>() == "-inf" ? -kInf : kInf;
  if (v.is_null()) return std::nan("");
  return v.get<double>();
}

const Json& result_of(const Json& report, const std::string& id) {
  for (const auto& r : report.at("results")) {
    if (r.at("id") == id) return r.at("result");
  }
  throw std::runtime_error("no result " + id);
}

const Json& report_of(const Json& result, const std::string& theorem) {
  for (const auto& r : result.at("reports")) {
    if (r.at("theorem") == theorem) return r;
  }
  throw std::runtime_error("no report " + theorem);
}

bool near(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Box box1(double lo, double hi) { return {make_vector({lo}), make_vector({hi})}; }

Matrix scalar(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

// -- random instance families ------------------------------------------------

struct Fan1d {
  double a, b, c;
  InclusionInstance inst;
};

Fan1d random_fan1d(oracle::Rand& r, int k) {
  const double sign = r.uniform() < 0.5 ? -1.0 : 1.0;
  const double a = sign * r.uniform(0.3, 3.0);
  const double b = sign * r.uniform(0.3, 3.0);
  const double c = r.uniform(-1.0, 1.0);
  InclusionInstance inst("fan1d_" + std::to_string(k), SetMap::fan({scalar(a), scalar(b)}, scalar(c)),
                         ConeSpec::halfline(), make_vector({0}), make_vector({0}), box1(-1, 1), box1(-2, 2));
  return {a, b, c, std::move(inst)};
}

InclusionInstance random_fan2d(oracle::Rand& r, int k) {
  std::vector<Matrix> ms;
  const int n = 1 + r.below(2);
  for (int i = 0; i < n; ++i) {
    Matrix L(2, 2);
    L << r.uniform(0.5, 2.5), r.uniform(-0.3, 0.3), r.uniform(-0.3, 0.3), r.uniform(0.5, 2.5);
    ms.push_back(L);
  }
  Matrix P(2, 1);
  P << r.uniform(-0.5, 0.5), r.uniform(-0.5, 0.5);
  return InclusionInstance("fan2d_" + std::to_string(k), SetMap::fan(ms, P), ConeSpec::orthant(2), make_vector({0}),
                           Vector::Zero(2), box1(-1, 1), Box{Vector::Constant(2, -1), Vector::Constant(2, 1)});
}

InclusionInstance random_affine_epigraph(oracle::Rand& r, int k) {
  const double a = r.uniform(0.3, 3.0);
  const double c = r.uniform(-1.0, 1.0);
  auto F = SetMap::epigraph(Expression::parse(fmt(a) + "*x + " + fmt(c) + "*p"));
  F.traits.concave_in_x = true;
  return InclusionInstance("affine_" + std::to_string(k), F, ConeSpec::halfline(), make_vector({0}), make_vector({0}),
                           box1(-1, 1), box1(-5, 5));
}

// -- criteria ------------------------------------------------------------------

Criterion ac1() {
  Criterion c;
  const auto t0 = Clock::now();
  const auto spec = parse_spec(read_fixture("cubic.json"));
  const Json rep = run_spec(spec, RunOptions{"sweep", {}, 1, false}).report;
  const double phi = num(result_of(rep, "phi_at_minus1").at("value"));
  c.check(std::abs(phi - 1.0) <= 1e-9, "phi(0,-1) = " + fmt(phi));
  const double slope = num(result_of(rep, "slope_at_minus1").at("estimate").at("value"));
  c.check(near(slope, 3.0, 0.01), "strong slope = " + fmt(slope));
  const Json& sost = result_of(rep, "sostslx").at("estimate");
  const double sv = num(sost.at("value"));
  c.check(sv <= 0.05, "sostslx = " + fmt(sv));
  double prev = kInf;
  for (const auto& l : sost.at("levels")) {
    c.check(num(l.at("value")) <= prev, "sostslx levels increase");
    prev = num(l.at("value"));
  }
  const double lip = num(result_of(rep, "liplsc_solv").at("estimate").at("value"));
  c.check(std::abs(lip - 1.0) <= 0.02, "Liplsc = " + fmt(lip));
  const Json& cert = report_of(result_of(rep, "cert_liplsc"), "3.1");
  c.check(cert.at("verdict") == "vacuous", "verdict " + cert.at("verdict").get<std::string>());
  const double secs = seconds_since(t0);
  c.check(secs < 5.0, "runtime " + fmt(secs) + " s");
  c.summary = "phi=" + fmt(phi) + " slope=" + fmt(slope) + " sostslx=" + fmt(sv) + " Liplsc=" + fmt(lip) +
              " verdict=" + cert.at("verdict").get<std::string>() + " (" + fmt(secs) + " s)";
  return c;
}

Criterion ac2() {
  Criterion c;
  const auto t0 = Clock::now();
  const auto spec = parse_spec(read_fixture("shift.json"));
  const Json rep = run_spec(spec, RunOptions{"sweep", {}, 1, false}).report;
  const double sost = num(result_of(rep, "sostslx").at("estimate").at("value"));
  c.check(near(sost, 1.0, 0.05), "sostslx = " + fmt(sost));
  const double lipusc = num(result_of(rep, "lipusc_F_p").at("estimate").at("value"));
  c.check(near(lipusc, 1.0, 0.05), "Lipusc = " + fmt(lipusc));
  const Json& r31 = report_of(result_of(rep, "cert_liplsc"), "3.1");
  c.check(near(num(r31.at("bound")), 1.0, 1e-6), "3.1 bound = " + fmt(num(r31.at("bound"))));
  const double emp = num(r31.at("empirical").at("value"));
  c.check(near(emp, 1.0, 0.02), "empirical Liplsc = " + fmt(emp));
  for (const auto& [id, th] : std::vector<std::pair<std::string, std::string>>{
           {"cert_liplsc", "3.1"}, {"cert_calm", "3.2"}, {"cert_lipusc", "3.3"}, {"cert_val", "4.3"}}) {
    const Json& r = report_of(result_of(rep, id), th);
    c.check(r.at("verdict") == "consistent", th + " verdict " + r.at("verdict").get<std::string>());
  }
  const Json& r43 = report_of(result_of(rep, "cert_val"), "4.3");
  const double b43 = num(r43.at("bound"));
  const double e43 = num(r43.at("empirical").at("value"));
  c.check(near(b43, 1.0, 1e-6), "4.3 bound = " + fmt(b43));
  c.check(near(e43, 1.0, 0.02), "calm(val) = " + fmt(e43));
  const double secs = seconds_since(t0);
  c.check(secs < 10.0, "runtime " + fmt(secs) + " s");
  c.summary = "sostslx=" + fmt(sost) + " Lipusc=" + fmt(lipusc) + " bound=" + fmt(num(r31.at("bound"))) +
              " Liplsc=" + fmt(emp) + " 4.3 bound=" + fmt(b43) + " calm(val)=" + fmt(e43) + " (" + fmt(secs) + " s)";
  return c;
}

Criterion ac3() {
  Criterion c;
  const auto spec = parse_spec(read_fixture("example22.json"));
  const Json rep = run_spec(spec, RunOptions{"sweep", {}, 1, false}).report;
  const Json& sq = result_of(rep, "sqrt_lipusc").at("estimate");
  c.check(sq.at("verdict") == "diverging", "sqrt verdict " + sq.at("verdict").get<std::string>());
  double worst = 0.0;
  for (const auto& l : sq.at("levels")) {
    const double ratio = num(l.at("value")) * std::sqrt(num(l.at("scale")));
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  c.check(worst <= 0.10, "level ratio off 1/sqrt(delta) by " + fmt(worst));
  const Json& u = result_of(rep, "sign_lipusc").at("estimate");
  c.check(num(u.at("value")) == 0.0, "halfline sign Lipusc = " + fmt(num(u.at("value"))));
  const Json& l = result_of(rep, "sign_liploc").at("estimate");
  c.check(l.at("verdict") == "diverging", "liploc verdict " + l.at("verdict").get<std::string>());
  c.check(num(l.at("value")) == kInf, "liploc value " + fmt(num(l.at("value"))));
  c.summary = "sqrt Lipusc diverging, max level deviation " + fmt(worst) + "; sign Lipusc 0, liploc " +
              l.at("verdict").get<std::string>();
  return c;
}

Criterion ac4() {
  Criterion c;
  oracle::Rand r(404);
  auto body = [](const std::vector<oracle::Vec>& vs) { return ConvexBody::polytope({vs.begin(), vs.end()}); };
  double worst_tri = 0.0;
  for (int i = 0; i < 500; ++i) {
    const int m = 1 + i % 3;
    const auto A = oracle::random_polytope(r, m, 1 + r.below(5), -2, 2);
    const auto B = oracle::random_polytope(r, m, 1 + r.below(5), -2, 2);
    const auto C = oracle::random_polytope(r, m, 1 + r.below(5), -2, 2);
    const double lhs = excess(body(A), body(C));
    const double rhs = excess(body(A), body(B)) + excess(body(B), body(C));
    worst_tri = std::max(worst_tri, lhs - rhs);
  }
  c.check(worst_tri <= 1e-9, "triangle inequality violated by " + fmt(worst_tri));

  double worst_dense = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int m = 1 + i % 3;
    const auto A = oracle::random_polytope(r, m, 2 + r.below(4), -2, 2);
    const auto B = oracle::random_polytope(r, m, 2 + r.below(4), -1, 1);
    const double lib = excess(body(A), body(B));
    const double ref = oracle::excess_dense(A, B, r, 200);
    worst_dense = std::max(worst_dense, std::abs(lib - ref));
  }
  c.check(worst_dense <= 1e-6, "vertex-max excess off the dense oracle by " + fmt(worst_dense));

  double worst_id = 0.0;
  int cases = 0;
  while (cases < 100) {
    const int m = 1 + cases % 3;
    const auto S = oracle::random_polytope(r, m, 1 + r.below(4), -2, 2);
    const double ref = oracle::excess_orthant(S);
    if (!(ref > 1e-3)) continue;
    const auto e = excess_identities_check(body(S), ConeSpec::orthant(m), r.uniform(0.05, 1.0));
    worst_id = std::max(worst_id, std::abs(e.base_excess - ref));
    if (!e.cone_sum.applicable || !e.enlarged.applicable) {
      worst_id = kInf;
      break;
    }
    worst_id = std::max(worst_id, std::abs(e.cone_sum.lhs - e.cone_sum.rhs));
    worst_id = std::max(worst_id, std::abs(e.enlarged.lhs - e.enlarged.rhs));
    ++cases;
  }
  c.check(worst_id <= 1e-9, "excess identities off by " + fmt(worst_id));
  c.summary = "triangle slack " + fmt(worst_tri) + ", dense-oracle gap " + fmt(worst_dense) + ", identity gap " +
              fmt(worst_id);
  return c;
}

Criterion ac5() {
  Criterion c;
  oracle::Rand r(505);
  double worst_hom = 0.0, worst_cvx = 0.0, worst_ref = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int m = 1 + r.below(3);
    const int n = 1 + r.below(3);
    std::vector<Matrix> ms;
    for (int i = 0, cnt = 1 + r.below(3); i < cnt; ++i) {
      Matrix L(m, n);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < n; ++b) L(a, b) = r.uniform(-2, 2);
      }
      ms.push_back(L);
    }
    const bool orthant = k % 2 == 0;
    std::vector<Vector> gens;
    for (int i = 0; i < m; ++i) {
      Vector g = Vector::Zero(m);
      g[i] = 1.0;
      if (!orthant && i + 1 < m) g[i + 1] = r.uniform(-0.9, 0.9);
      gens.push_back(g);
    }
    const ConeSpec C = orthant ? ConeSpec::orthant(m) : ConeSpec::from_generators(gens, m);
    const SetMap F = SetMap::fan(ms);
    const Vector p0 = make_vector({0});
    auto phi_at = [&](const Vector& x) { return phi(F, C, p0, x); };
    for (int s = 0; s < 4; ++s) {
      const Vector x = oracle::random_point(r, n, -2, 2);
      const double base = phi_at(x);
      for (double t : {0.5, 2.0, 7.0}) {
        worst_hom = std::max(worst_hom, std::abs(phi_at(t * x) - t * base) / (1.0 + t * base));
      }
      if (orthant) {
        double ref = 0.0;
        for (const auto& L : ms) ref = std::max(ref, oracle::dist_orthant(L * x));
        worst_ref = std::max(worst_ref, std::abs(base - ref));
      }
    }
    for (int s = 0; s < 200; ++s) {
      const Vector x1 = oracle::random_point(r, n, -2, 2);
      const Vector x2 = oracle::random_point(r, n, -2, 2);
      const double t = r.uniform();
      const double gap = phi_at(t * x1 + (1.0 - t) * x2) - (t * phi_at(x1) + (1.0 - t) * phi_at(x2));
      worst_cvx = std::max(worst_cvx, gap);
    }
  }
  c.check(worst_hom <= 1e-9, "homogeneity off by " + fmt(worst_hom));
  c.check(worst_cvx <= 1e-9, "convexity violated by " + fmt(worst_cvx));
  c.check(worst_ref <= 1e-9, "phi off the orthant closed form by " + fmt(worst_ref));
  c.summary = "homogeneity gap " + fmt(worst_hom) + ", convexity violation " + fmt(worst_cvx) +
              ", closed-form gap " + fmt(worst_ref);
  return c;
}

Criterion ac6() {
  Criterion c;
  oracle::Rand r(606);
  bool cov_exact = true;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + r.below(4);
    const oracle::Vec d = oracle::random_point(r, n, -5, 5);
    cov_exact = cov_exact && cov_matrix(d.asDiagonal().toDenseMatrix()) == oracle::sigma_min_diagonal(d);
  }
  c.check(cov_exact, "cov differs from the smallest diagonal magnitude");

  auto halfline = [](const Vector& x) { return ConvexBody::interval(x[0], kInf); };
  const Box window = box1(-2, 2);
  for (double alpha : {2.0, 2.5}) {
    bool oracle_ok = true;
    for (const auto& x : box_grid(window, 9)) {
      for (double rr : IncreaseOptions{}.radii) oracle_ok = oracle_ok && oracle::halfline_increase_holds(x[0], rr, alpha);
    }
    const bool lib = check_c_increase_global(halfline, ConeSpec::halfline(), alpha, window, {}).valid();
    c.check(lib == oracle_ok, "alpha " + fmt(alpha) + ": library " + std::to_string(lib) + ", oracle " +
                                  std::to_string(oracle_ok));
    c.check(lib == (alpha <= 2.0), "alpha " + fmt(alpha) + " misclassified");
  }

  int certified = 0, points = 0;
  double worst = kInf;
  const std::vector<double> radii{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
  for (int k = 0; k < 20; ++k) {
    const Fan1d f = random_fan1d(r, k);
    const auto reps = certify_increase_slope(f.inst);
    std::map<std::string, double> alpha;
    for (const auto& rep : reps) {
      for (const auto& comp : rep.components) {
        if (comp.name.rfind("alpha_", 0) == 0) alpha[comp.name.substr(6)] = comp.est.value;
      }
      if (rep.bound) {
        c.check(rep.empirical.value >= *rep.bound * 0.9 - 1e-9,
                f.inst.id() + " " + rep.theorem + ": empirical " + fmt(rep.empirical.value) + " < bound " +
                    fmt(*rep.bound));
      }
    }
    const bool global_ok = std::any_of(reps.begin(), reps.end(), [](const auto& x) {
      return x.theorem == "5.2-iii" && x.bound.has_value();
    });
    if (!global_ok) continue;
    ++certified;
    const double need = (alpha["global"] - 1.0) * 0.9;
    const ScalarFn psi = phi_in_x(f.inst, f.inst.pbar());
    for (const auto& x : box_grid(f.inst.x_window(), 81)) {
      if (!(psi(x) > 1e-9)) continue;
      const Estimate e = strong_slope(psi, x, radii, 2);
      double measured = 0.0;
      for (const auto& l : e.levels) measured = std::max(measured, l.value);
      const double exact = oracle::slope_fan1d(f.a, f.b, f.c, 0.0, x[0]);
      worst = std::min(worst, std::min(measured, exact) - need);
      ++points;
    }
  }
  c.check(certified >= 10, "only " + std::to_string(certified) + " of 20 instances certified");
  c.check(worst >= -1e-9, "slope below (alpha-1) less slack by " + fmt(-worst));
  c.summary = "cov exact on 100 diagonals; alpha 2 certified, 2.5 rejected; " + std::to_string(certified) +
              "/20 instances certified, " + std::to_string(points) + " infeasible points, min margin " + fmt(worst);
  return c;
}

Criterion ac7() {
  Criterion c;
  const auto t0 = Clock::now();
  int reports = 0, supported = 0, violated = 0, skipped = 0;
  auto tally = [&](const CertificationReport& r) {
    ++reports;
    if (!r.hypotheses_supported()) return;
    ++supported;
    if (r.verdict == Verdict::violated) {
      ++violated;
      c.failures.push_back(r.instance_id + " " + r.theorem + ": bound " + (r.bound ? fmt(*r.bound) : "none") +
                           ", empirical " + fmt(r.empirical.value));
    }
  };
  auto run_all = [&](const InclusionInstance& inst, const std::optional<Objective>& theta) {
    const std::vector<std::function<std::vector<CertificationReport>()>> families{
        [&] { return std::vector<CertificationReport>{certify_liplsc(inst)}; },
        [&] { return std::vector<CertificationReport>{certify_calm(inst)}; },
        [&] { return std::vector<CertificationReport>{certify_lipusc(inst)}; },
        [&] { return theta ? certify_val(inst, *theta) : std::vector<CertificationReport>{}; },
        [&] { return certify_increase_slope(inst); },
    };
    for (const auto& fam : families) {
      try {
        for (const auto& r : fam()) tally(r);
      } catch (const InputError&) {
        ++skipped;
      }
    }
  };
  for (const char* f : {"cubic.json", "shift.json", "example22.json", "fan.json"}) {
    const auto spec = parse_spec(read_fixture(f));
    for (const auto& is : spec.instances) run_all(is.inst, is.objective);
  }
  oracle::Rand r(707);
  for (int k = 0; k < 50; ++k) {
    if (k < 35) {
      const Fan1d f = random_fan1d(r, k);
      const bool rising = f.a > 0.0;
      run_all(f.inst, Objective::from_expression(Expression::parse(rising ? "x" : "-x")));
    } else if (k < 45) {
      run_all(random_fan2d(r, k), std::nullopt);
    } else {
      run_all(random_affine_epigraph(r, k), Objective::from_expression(Expression::parse("x")));
    }
  }
  const double secs = seconds_since(t0);
  c.check(supported > 0, "no report had supported hypotheses");
  c.check(secs < 180.0, "runtime " + fmt(secs) + " s");
  c.summary = std::to_string(reports) + " reports, " + std::to_string(supported) + " with supported hypotheses, " +
              std::to_string(violated) + " violated, " + std::to_string(skipped) + " families not applicable (" +
              fmt(secs) + " s)";
  return c;
}

Criterion ac8() {
  Criterion c;
  const std::string text = read_fixture("full.json");
  const auto a = run_spec(parse_spec(text, 1234), RunOptions{"sweep", {}, 1, false});
  const auto b = run_spec(parse_spec(text, 1234), RunOptions{"sweep", {}, 4, false});
  const std::string da = dump_report(a.report);
  const std::string db = dump_report(b.report);
  c.check(da == db, "reports differ");
  c.summary = std::to_string(a.report["results"].size()) + " analyses, " + std::to_string(da.size()) +
              " bytes, hash " + fnv1a_hex(da) + (da == db ? " (identical)" : " vs " + fnv1a_hex(db));
  return c;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<const char*, Criterion (*)()>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    if (!ok) ++failed;
    std::printf("%s %s: %s\n", name, ok ? "PASS" : "FAIL", c.summary.c_str());
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
