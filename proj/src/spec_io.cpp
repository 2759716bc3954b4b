#include "svi/spec_io.hpp"

#include "svi/increase.hpp"
#include "svi/moduli.hpp"
#include "svi/slopes.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#ifndef SVI_VERSION
#define SVI_VERSION "0.0.0"
#endif

namespace svi {

namespace {

std::string key_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

/// Typed access to one JSON node; remembers which keys were read so that
/// leftovers can be reported as unknown fields.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  bool is_null() const { return j_->is_null(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError((path_.empty() ? std::string("spec") : path_) + ": " + msg);
  }

  void expect_object() const {
    if (!j_->is_object()) fail("expected an object");
  }

  bool has(std::string_view key) const {
    expect_object();
    return j_->contains(std::string(key));
  }

  Reader req(std::string_view key) const {
    expect_object();
    const std::string k(key);
    if (!j_->contains(k)) Reader(*j_, key_path(path_, key)).fail("missing required field");
    used_.insert(k);
    return Reader(j_->at(k), key_path(path_, key));
  }

  std::optional<Reader> opt(std::string_view key) const {
    expect_object();
    const std::string k(key);
    if (!j_->contains(k)) return std::nullopt;
    used_.insert(k);
    return Reader(j_->at(k), key_path(path_, key));
  }

  void finish() const {
    expect_object();
    for (const auto& [k, v] : j_->items()) {
      if (!used_.count(k)) Reader(v, key_path(path_, k)).fail("unknown field");
    }
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  Reader item(std::size_t i) const { return Reader(j_->at(i), path_ + "[" + std::to_string(i) + "]"); }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  /// null reads as the given infinity
  double extended(double if_null) const { return is_null() ? if_null : number(); }

  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  /// A bare number is read as a 1-vector.
  Vector vector() const {
    if (j_->is_number()) return make_vector({number()});
    const std::size_t n = size();
    if (n == 0) fail("expected a nonempty array of numbers");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = item(i).number();
    return v;
  }

  std::vector<Vector> vectors() const {
    std::vector<Vector> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(item(i).vector());
    return out;
  }

  Matrix matrix() const {
    const std::size_t rows = size();
    if (rows == 0) fail("expected a nonempty list of rows");
    std::vector<Vector> rs;
    for (std::size_t i = 0; i < rows; ++i) rs.push_back(item(i).vector());
    Matrix m(static_cast<Eigen::Index>(rows), rs.front().size());
    for (std::size_t i = 0; i < rows; ++i) {
      if (rs[i].size() != m.cols()) item(i).fail("rows must have equal length");
      m.row(static_cast<Eigen::Index>(i)) = rs[i].transpose();
    }
    return m;
  }

 private:
  const Json* j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

template <class F>
auto wrap(const Reader& r, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(r.path(), 0) == 0) throw;
    r.fail(msg);
  } catch (const InstanceError& e) {
    r.fail(e.what());
  }
}

Box read_box(const Reader& r) {
  Box b{r.req("lo").vector(), r.req("hi").vector()};
  r.finish();
  if (b.lo.size() != b.hi.size()) r.fail("lo and hi differ in dimension");
  if ((b.lo.array() > b.hi.array()).any()) r.fail("lo exceeds hi");
  return b;
}

ConvexBody read_body(const Reader& r) {
  const std::string kind = r.req("kind").str();
  auto body = [&]() -> ConvexBody {
    if (kind == "interval") {
      return ConvexBody::interval(r.req("lo").extended(-kInf), r.req("hi").extended(kInf));
    }
    if (kind == "polytope") return ConvexBody::polytope(r.req("vertices").vectors());
    if (kind == "singleton") return ConvexBody::singleton(r.req("point").vector());
    if (kind == "hpolyhedron") {
      const Reader hs = r.req("halfspaces");
      std::vector<Halfspace> out;
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const Reader h = hs.item(i);
        out.push_back({h.req("normal").vector(), h.req("offset").number()});
        h.finish();
      }
      return ConvexBody::hpolyhedron(std::move(out), static_cast<int>(r.req("dim").integer()));
    }
    if (kind == "cone") {
      return ConvexBody::cone(r.req("generators").vectors(), static_cast<int>(r.req("dim").integer()));
    }
    if (kind == "shifted_cone") return ConvexBody::shifted_cone(r.req("apex").vector(), r.req("generators").vectors());
    if (kind == "vpolyhedron") {
      auto rays = r.opt("rays");
      return ConvexBody::vpolyhedron(r.req("points").vectors(), rays ? rays->vectors() : std::vector<Vector>{});
    }
    if (kind == "enlargement") {
      const ConvexBody base = read_body(r.req("base"));
      return ConvexBody::enlargement(base, r.req("radius").number());
    }
    r.req("kind").fail("unknown body kind '" + kind + "'");
  };
  ConvexBody b = wrap(r, body);
  r.finish();
  return b;
}

ConeSpec read_cone(const Reader& r) {
  const std::string kind = r.req("kind").str();
  auto cone = [&]() -> ConeSpec {
    if (kind == "halfline") return ConeSpec::halfline();
    if (kind == "orthant") return ConeSpec::orthant(static_cast<int>(r.req("dim").integer()));
    if (kind == "generators") {
      return ConeSpec::from_generators(r.req("generators").vectors(), static_cast<int>(r.req("dim").integer()));
    }
    if (kind == "normals") {
      return ConeSpec::from_normals(r.req("normals").vectors(), static_cast<int>(r.req("dim").integer()));
    }
    if (kind == "both") {
      return ConeSpec::from_both(r.req("generators").vectors(), r.req("normals").vectors(),
                                 static_cast<int>(r.req("dim").integer()));
    }
    r.req("kind").fail("unknown cone kind '" + kind + "'");
  };
  ConeSpec c = wrap(r, cone);
  r.finish();
  return c;
}

Variable read_var(const std::optional<Reader>& r) {
  if (!r) return Variable::x;
  const std::string v = r->str();
  if (v == "x") return Variable::x;
  if (v == "p") return Variable::p;
  r->fail("expected \"x\" or \"p\"");
}

Expression read_expr(const Reader& r) {
  const std::string text = r.str();
  try {
    return Expression::parse(text);
  } catch (const InputError& e) {
    r.fail(e.what());
  }
}

SetMap read_map(const Reader& r) {
  const std::string kind = r.req("kind").str();
  auto map = [&]() -> SetMap {
    if (kind == "epigraph") return SetMap::epigraph(read_expr(r.req("f")));
    if (kind == "fan") {
      const Reader ms = r.req("matrices");
      std::vector<Matrix> mats;
      for (std::size_t i = 0; i < ms.size(); ++i) mats.push_back(ms.item(i).matrix());
      std::optional<Matrix> pm;
      if (auto p = r.opt("p_matrix")) pm = p->matrix();
      return SetMap::fan(std::move(mats), pm);
    }
    if (kind == "constant") return SetMap::constant(read_body(r.req("set")));
    if (kind == "sqrt_interval") return SetMap::sqrt_interval(read_var(r.opt("var")));
    if (kind == "halfline_sign") return SetMap::halfline_sign(read_var(r.opt("var")));
    r.req("kind").fail("unknown map kind '" + kind + "'");
  };
  SetMap m = wrap(r, map);
  if (auto h = r.opt("lipschitz_p_hint")) {
    const double v = h->number();
    if (v < 0) h->fail("must be nonnegative");
    m.traits.lipschitz_p_hint = v;
  }
  if (auto c = r.opt("concave_in_x")) m.traits.concave_in_x = c->boolean();
  r.finish();
  return m;
}

Objective read_objective(const Reader& r) {
  if (r.raw().is_string()) return Objective::from_expression(read_expr(r));
  std::optional<double> hint;
  if (auto h = r.opt("lip_hint")) hint = h->number();
  Objective o = Objective::from_expression(read_expr(r.req("expr")), hint);
  r.finish();
  return o;
}

void read_tolerances(const Reader& r, Tolerances& t) {
  static const std::pair<const char*, double Tolerances::*> fields[] = {
      {"membership", &Tolerances::membership}, {"root", &Tolerances::root},
      {"slice", &Tolerances::slice},           {"slope", &Tolerances::slope},
      {"value", &Tolerances::value},           {"slack", &Tolerances::slack},
      {"positivity", &Tolerances::positivity}, {"converge_rel", &Tolerances::converge_rel},
      {"converge_abs", &Tolerances::converge_abs}, {"diverge_factor", &Tolerances::diverge_factor}};
  for (const auto& [name, field] : fields) {
    if (auto v = r.opt(name)) {
      const double x = v->number();
      if (x < 0) v->fail("must be nonnegative");
      t.*field = x;
    }
  }
  r.finish();
}

std::vector<double> read_schedule(const Reader& r) {
  std::vector<double> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = r.item(i).number();
    if (!(v > 0)) r.item(i).fail("must be positive");
    if (!out.empty() && !(v < out.back())) r.item(i).fail("schedule must strictly decrease");
    out.push_back(v);
  }
  if (out.empty()) r.fail("schedule is empty");
  return out;
}

void read_schedules(const Reader& r, Schedules& s) {
  if (auto v = r.opt("radii")) s.radii = read_schedule(*v);
  if (auto v = r.opt("eps")) s.eps = read_schedule(*v);
  if (auto v = r.opt("deltas")) s.deltas = read_schedule(*v);
  auto count = [](const Reader& v, int lo, int hi) {
    const long long n = v.integer();
    if (n < lo || n > hi) v.fail("must lie in [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    return static_cast<int>(n);
  };
  if (auto v = r.opt("dirs_n")) s.dirs_n = count(*v, 2, 4096);
  if (auto v = r.opt("grid_n")) s.grid_n = count(*v, 3, 401);
  r.finish();
}

// Parameter type tags per operation, checked at validation time.
enum class PType { num, integer, str, vec, vecs, box, body };

const std::map<std::string, std::map<std::string, PType>>& op_params() {
  static const std::map<std::string, std::map<std::string, PType>> table = [] {
    const std::map<std::string, PType> cert{{"bound_override", PType::num},
                                            {"zeta", PType::num},
                                            {"tau_region", PType::box},
                                            {"alpha", PType::num},
                                            {"delta", PType::num}};
    std::map<std::string, std::map<std::string, PType>> t;
    t["phi"] = {{"p", PType::vec}, {"x", PType::vec}};
    t["solve_slice"] = {{"p", PType::vec}};
    t["strong_slope"] = {{"p", PType::vec}, {"x", PType::vec}};
    t["strict_outer_slope"] = {{"p", PType::vec}, {"x", PType::vec}};
    t["partial_strict_outer_slope"] = {};
    t["tau"] = {{"region", PType::box}};
    t["modulus"] = {{"kind", PType::str}, {"of", PType::str}, {"zeta", PType::num}, {"y", PType::vec}};
    t["joint_lipschitz"] = {};
    t["parametric_lipschitz"] = {};
    t["value_profile"] = {{"ps", PType::vecs}, {"from", PType::num}, {"to", PType::num}, {"n", PType::integer}};
    t["val_report"] = {{"tau_region", PType::box}};
    t["increase"] = {{"variant", PType::str}, {"alpha", PType::num}, {"delta", PType::num}};
    t["largest_alpha"] = {{"variant", PType::str}, {"delta", PType::num}, {"cap", PType::num}};
    t["fan_bound"] = {{"sample_n", PType::integer}};
    t["excess_identities"] = {{"set", PType::body}, {"r", PType::num}};
    for (const char* c : {"certify_liplsc", "certify_calm", "certify_lipusc", "certify_val", "certify_increase_slope"}) {
      t[c] = cert;
    }
    return t;
  }();
  return table;
}

void check_params(const std::string& op, const Reader& params) {
  params.expect_object();
  const auto& allowed = op_params().at(op);
  for (const auto& [k, tag] : allowed) {
    auto v = params.opt(k);
    if (!v) continue;
    switch (tag) {
      case PType::num: v->number(); break;
      case PType::integer: v->integer(); break;
      case PType::str: v->str(); break;
      case PType::vec: v->vector(); break;
      case PType::vecs: v->vectors(); break;
      case PType::box: read_box(*v); break;
      case PType::body: read_body(*v); break;
    }
  }
  params.finish();
}

}  // namespace

const InstanceSpec& SpecFile::instance(const std::string& id) const {
  for (const auto& i : instances) {
    if (i.inst.id() == id) return i;
  }
  throw InputError("unknown instance '" + id + "'");
}

OpClass op_class(std::string_view op) {
  if (!op_params().count(std::string(op))) throw InputError("unknown analysis op '" + std::string(op) + "'");
  return op.substr(0, 8) == "certify_" ? OpClass::certify : OpClass::analyze;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<Json> tolerance_override_from_env() {
  const char* path = std::getenv("SVI_TOL_OVERRIDE");
  if (!path || !*path) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw InputError(std::string("SVI_TOL_OVERRIDE: cannot open '") + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("SVI_TOL_OVERRIDE: ") + e.what());
  }
}

SpecFile parse_spec(std::string_view text, std::optional<std::uint64_t> seed_override,
                    const std::optional<Json>& tolerance_override) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // translate the byte offset into line:column
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("spec: JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  const Reader r(root, "");
  r.expect_object();
  SpecFile spec;
  spec.input_hash = fnv1a_hex(text);

  const Reader ver = r.req("version");
  spec.version = static_cast<int>(ver.integer());
  if (spec.version != 1) ver.fail("unsupported version " + std::to_string(spec.version));
  if (auto s = r.opt("seed")) {
    const long long v = s->integer();
    if (v < 0) s->fail("must be nonnegative");
    spec.settings.seed = static_cast<std::uint64_t>(v);
  }
  if (seed_override) spec.settings.seed = *seed_override;
  if (auto t = r.opt("tolerances")) read_tolerances(*t, spec.settings.tol);
  if (tolerance_override) read_tolerances(Reader(*tolerance_override, "SVI_TOL_OVERRIDE"), spec.settings.tol);
  if (auto s = r.opt("schedules")) read_schedules(*s, spec.settings.sched);

  const Reader insts = r.req("instances");
  if (insts.size() == 0) insts.fail("at least one instance is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const Reader ir = insts.item(i);
    const std::string id = ir.req("id").str();
    if (id.empty()) ir.req("id").fail("must be nonempty");
    if (!ids.insert(id).second) ir.req("id").fail("duplicate instance id '" + id + "'");
    SetMap F = read_map(ir.req("map"));
    ConeSpec C = read_cone(ir.req("cone"));
    const Vector pbar = ir.req("pbar").vector();
    const Vector xbar = ir.req("xbar").vector();
    const Box pw = read_box(ir.req("p_window"));
    const Box xw = read_box(ir.req("x_window"));
    std::optional<Objective> obj;
    if (auto o = ir.opt("objective")) obj = read_objective(*o);
    std::optional<Box> tr;
    if (auto t = ir.opt("tau_region")) tr = read_box(*t);
    std::optional<double> alpha;
    if (auto a = ir.opt("alpha")) {
      alpha = a->number();
      if (!(*alpha > 1.0)) a->fail("alpha must exceed 1");
    }
    ir.finish();
    InclusionInstance inst = wrap(ir, [&] { return InclusionInstance(id, F, C, pbar, xbar, pw, xw, spec.settings); });
    if (tr && tr->dim() != inst.x_dim()) ir.req("tau_region").fail("dimension differs from x");
    spec.instances.push_back({std::move(inst), std::move(obj), tr, alpha});
  }

  if (auto as = r.opt("analyses")) {
    std::set<std::string> aids;
    for (std::size_t i = 0; i < as->size(); ++i) {
      const Reader ar = as->item(i);
      AnalysisSpec a;
      a.op = ar.req("op").str();
      if (!op_params().count(a.op)) ar.req("op").fail("unknown analysis op '" + a.op + "'");
      a.instance = ar.req("instance").str();
      if (!ids.count(a.instance)) ar.req("instance").fail("unknown instance '" + a.instance + "'");
      a.id = ar.opt("id") ? ar.req("id").str() : a.op + ":" + a.instance;
      if (!aids.insert(a.id).second) ar.fail("duplicate analysis id '" + a.id + "'");
      if (auto p = ar.opt("params")) {
        check_params(a.op, *p);
        a.params = p->raw();
      } else {
        a.params = Json::object();
      }
      ar.finish();
      if ((a.op == "certify_val" || a.op == "val_report" || a.op == "value_profile") &&
          !spec.instance(a.instance).objective) {
        ar.req("instance").fail("op '" + a.op + "' needs an objective on the instance");
      }
      spec.analyses.push_back(std::move(a));
    }
  }
  r.finish();
  return spec;
}

// ---------------------------------------------------------------------------
// JSON conversion

Json to_json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json_number(v[i]));
  return a;
}

Json to_json(const Estimate& e) {
  Json j;
  j["value"] = to_json_number(e.value);
  j["verdict"] = std::string(to_string(e.verdict));
  Json levels = Json::array();
  for (const auto& l : e.levels) levels.push_back({{"scale", to_json_number(l.scale)}, {"value", to_json_number(l.value)}});
  j["levels"] = std::move(levels);
  j["flags"] = e.flags;
  return j;
}

namespace {

Json box_json(const Box& b) { return {{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}}; }

Json optional_number(const std::optional<double>& v, const char* missing) {
  return v ? to_json_number(*v) : Json(missing);
}

}  // namespace

Json to_json(const CertificationReport& r) {
  Json j;
  j["instance_id"] = r.instance_id;
  j["theorem"] = r.theorem;
  Json hyps = Json::array();
  for (const auto& h : r.hypotheses) {
    hyps.push_back({{"id", h.id},
                    {"description", h.description},
                    {"status", std::string(to_string(h.status))},
                    {"evidence", h.evidence}});
  }
  j["hypotheses"] = std::move(hyps);
  j["bound"] = optional_number(r.bound, "not-evaluable");
  j["bound_kind"] = std::string(to_string(r.bound_kind));
  Json emp = to_json(r.empirical);
  emp["kind"] = r.empirical_kind;
  j["empirical"] = std::move(emp);
  j["margin"] = r.margin ? to_json_number(*r.margin) : Json(nullptr);
  j["verdict"] = std::string(to_string(r.verdict));
  j["seed"] = r.seed;
  Json comps = Json::object();
  for (const auto& c : r.components) comps[c.name] = to_json(c.est);
  j["components"] = std::move(comps);
  j["notes"] = r.notes;
  j["timings"] = nullptr;
  return j;
}

Json to_json(const IncreaseCertificate& c) {
  constexpr std::size_t kListed = 20;
  Json j;
  j["variant"] = std::string(to_string(c.variant));
  j["alpha"] = to_json_number(c.alpha);
  j["delta"] = to_json_number(c.delta);
  j["valid"] = c.valid();
  j["checked_n"] = c.checked_n;
  j["witnesses_n"] = c.witnesses.size();
  j["failures_n"] = c.failures.size();
  Json w = Json::array();
  for (std::size_t i = 0; i < std::min(kListed, c.witnesses.size()); ++i) {
    const auto& x = c.witnesses[i];
    w.push_back({{"p", to_json(x.p)}, {"x", to_json(x.x)}, {"r", x.r}, {"u", to_json(x.u)}});
  }
  j["witnesses"] = std::move(w);
  Json f = Json::array();
  for (std::size_t i = 0; i < std::min(kListed, c.failures.size()); ++i) {
    const auto& x = c.failures[i];
    f.push_back({{"p", to_json(x.p)}, {"x", to_json(x.x)}, {"r", x.r}, {"reason", x.reason}});
  }
  j["failures"] = std::move(f);
  return j;
}

Json to_json(const FanBound& f) {
  Json j;
  j["applicable"] = f.applicable;
  j["reason"] = f.reason;
  j["eta_bar"] = to_json_number(f.eta_bar);
  j["value"] = to_json_number(f.value);
  j["constructive_bound"] = to_json_number(f.constructive_bound);
  j["rho"] = to_json_number(f.rho);
  j["interiority"] = {{"ok", f.interiority.ok},
                      {"witness", to_json(f.interiority.witness)},
                      {"margin", to_json_number(f.interiority.margin)}};
  j["samples"] = f.samples;
  j["flags"] = f.flags;
  return j;
}

Json to_json(const ValueResult& v) {
  Json a = Json::array();
  for (const auto& x : v.argmin) a.push_back(to_json(x));
  return {{"val", to_json_number(v.val)},
          {"argmin", std::move(a)},
          {"status", std::string(to_string(v.status))},
          {"flags", v.flags}};
}

Json to_json(const ValCalmnessReport& r) {
  Json j;
  j["at_pbar"] = to_json(r.at_pbar);
  j["ucalm"] = to_json(r.empirical.upper.est);
  j["lcalm"] = to_json(r.empirical.lower.est);
  j["calm"] = to_json(r.empirical.both.est);
  j["theta_ucalm"] = to_json(r.theta_ucalm);
  j["theta_lip"] = to_json(r.theta_lip);
  j["lipusc_F_p"] = to_json(r.lipusc_F);
  j["sostslx"] = to_json(r.sostslx);
  j["lip_p_F"] = to_json(r.lip_p);
  j["tau"] = to_json(r.tau);
  j["tau_region"] = box_json(r.tau_region);
  Json bounds = Json::array();
  for (const ValBound* b : {&r.ucalm_bound, &r.lcalm_bound, &r.calm_bound}) {
    bounds.push_back({{"id", b->id}, {"value", optional_number(b->value, "not-evaluable")}, {"note", b->note}});
  }
  j["bounds"] = std::move(bounds);
  return j;
}

// ---------------------------------------------------------------------------
// Running analyses

namespace {

Vector param_vec(const Json& params, const char* key, const Vector& fallback, int dim, const std::string& path) {
  if (!params.contains(key)) return fallback;
  const Vector v = Reader(params.at(key), path + ".params." + key).vector();
  if (v.size() != dim) Reader(params.at(key), path + ".params." + key).fail("dimension mismatch");
  return v;
}

double param_num(const Json& params, const char* key, double fallback) {
  return params.contains(key) ? params.at(key).get<double>() : fallback;
}

std::optional<Box> param_box(const Json& params, const char* key, const std::string& path) {
  if (!params.contains(key)) return std::nullopt;
  return read_box(Reader(params.at(key), path + ".params." + key));
}

CertifyOptions certify_options(const InstanceSpec& is, const Json& params, const std::string& path) {
  CertifyOptions o;
  if (params.contains("bound_override")) o.bound_override = params.at("bound_override").get<double>();
  if (params.contains("zeta")) o.zeta = params.at("zeta").get<double>();
  o.tau_region = param_box(params, "tau_region", path);
  if (!o.tau_region) o.tau_region = is.tau_region;
  if (params.contains("alpha")) o.alpha = params.at("alpha").get<double>();
  else o.alpha = is.alpha;
  o.increase_delta = param_num(params, "delta", o.increase_delta);
  if (o.tau_region && o.tau_region->dim() != is.inst.x_dim()) {
    throw InputError(path + ".params.tau_region: dimension differs from x");
  }
  if (o.alpha && !(*o.alpha > 1.0)) throw InputError(path + ".params.alpha: alpha must exceed 1");
  if (!(o.increase_delta > 0.0)) throw InputError(path + ".params.delta: must be positive");
  return o;
}

Json reports_json(const std::vector<CertificationReport>& rs) {
  Json a = Json::array();
  for (const auto& r : rs) a.push_back(to_json(r));
  return {{"reports", std::move(a)}};
}

IncreaseOptions increase_options(const InstanceSpec& is) {
  IncreaseOptions io;
  if (const auto* m = std::get_if<FanMap>(&is.inst.map().repr())) {
    const FanBound fb = fan_increase_bound(m->matrices, is.inst.cone(), 512, is.inst.settings().seed);
    if (fb.applicable) io.witness_dir = fb.interiority.witness;
  }
  return io;
}

std::function<IncreaseCertificate(double)> increase_check(const InstanceSpec& is, const std::string& variant,
                                                          double delta, const std::string& path) {
  const auto& inst = is.inst;
  IncreaseOptions io = increase_options(is);
  auto slice = [&inst](const Vector& x) { return inst.evaluate(inst.pbar(), x); };
  if (variant == "global") {
    return [=, &inst](double a) { return check_c_increase_global(slice, inst.cone(), a, inst.x_window(), io); };
  }
  if (variant == "local") {
    return [=, &inst](double a) { return check_c_increase_local(slice, inst.cone(), a, inst.xbar(), delta, io); };
  }
  if (variant == "uniform") {
    return [=, &inst](double a) { return check_c_increase_uniform(inst, a, delta, io); };
  }
  throw InputError(path + ".params.variant: expected global, local or uniform");
}

Json run_one(const SpecFile& spec, const AnalysisSpec& a, std::size_t index) {
  const std::string path = "analyses[" + std::to_string(index) + "]";
  const InstanceSpec& is = spec.instance(a.instance);
  const InclusionInstance& inst = is.inst;
  const Settings& s = inst.settings();
  const ModulusOptions mo = ModulusOptions::from(s);
  const Json& P = a.params;
  const std::string& op = a.op;

  if (op == "phi") {
    const Vector p = param_vec(P, "p", inst.pbar(), inst.p_dim(), path);
    const Vector x = param_vec(P, "x", inst.xbar(), inst.x_dim(), path);
    return {{"p", to_json(p)}, {"x", to_json(x)}, {"value", to_json_number(inst.phi(p, x))},
            {"in_solution", inst.in_solution(p, x)}};
  }
  if (op == "solve_slice") {
    const Vector p = param_vec(P, "p", inst.pbar(), inst.p_dim(), path);
    const SolutionSlice sl = solve_slice_1d(inst, p);
    Json pieces = Json::array();
    for (const auto& pc : sl.pieces) {
      pieces.push_back({{"lo", pc.lo}, {"hi", pc.hi}, {"lo_clipped", pc.lo_clipped}, {"hi_clipped", pc.hi_clipped}});
    }
    return {{"p", to_json(p)}, {"window", {sl.window_lo, sl.window_hi}}, {"pieces", std::move(pieces)}};
  }
  if (op == "strong_slope") {
    const Vector p = param_vec(P, "p", inst.pbar(), inst.p_dim(), path);
    const Vector x = param_vec(P, "x", inst.xbar(), inst.x_dim(), path);
    const int dirs = inst.x_dim() == 1 ? 2 : s.sched.dirs_n;
    return {{"estimate", to_json(strong_slope(phi_in_x(inst, p), x, s.sched.radii, dirs, s.tol))}};
  }
  if (op == "strict_outer_slope") {
    const Vector p = param_vec(P, "p", inst.pbar(), inst.p_dim(), path);
    const Vector x = param_vec(P, "x", inst.xbar(), inst.x_dim(), path);
    return {{"estimate", to_json(strict_outer_slope(phi_in_x(inst, p), x, s.sched.eps, s.sched.grid_n, s))}};
  }
  if (op == "partial_strict_outer_slope") return {{"estimate", to_json(partial_strict_outer_slope(inst))}};
  if (op == "tau") {
    const Box region = param_box(P, "region", path).value_or(is.tau_region.value_or(inst.x_window()));
    if (region.dim() != inst.x_dim()) throw InputError(path + ".params.region: dimension differs from x");
    return {{"region", box_json(region)}, {"estimate", to_json(tau(inst, region, s.sched.grid_n))}};
  }
  if (op == "modulus") {
    const std::string kind = P.value("kind", std::string("liplsc"));
    const std::string of = P.value("of", std::string("solv"));
    ParamSetMap Phi;
    Vector base_p = inst.pbar();
    Vector point;
    if (of == "solv") {
      if (inst.x_dim() != 1) throw InputError(path + ".params.of: Solv moduli need x_dim = 1");
      Phi = ParamSetMap::solution_map(inst);
      point = inst.xbar();
    } else if (of == "F_p") {
      Phi = ParamSetMap::map_in_p(inst.map(), inst.xbar());
    } else if (of == "F_x") {
      Phi = ParamSetMap::map_in_x(inst.map(), inst.pbar());
      base_p = inst.xbar();
    } else {
      throw InputError(path + ".params.of: expected solv, F_p or F_x");
    }
    if (P.contains("y")) point = param_vec(P, "y", Vector(), Phi.y_dim, path);
    Json out{{"kind", kind}, {"of", of}};
    if (kind == "liplsc" || kind == "calm") {
      if (point.size() == 0) throw InputError(path + ".params.y: needed for " + kind + " of a map of F");
      if (!(Phi(base_p).dist(point) <= s.tol.membership)) {
        throw InputError(path + ": reference point is not in the value at the base point");
      }
      if (kind == "liplsc") {
        out["estimate"] = to_json(liplsc_modulus(Phi, base_p, point, mo).est);
      } else {
        const double zeta = param_num(P, "zeta", 0.5 * inst.x_window().half_width());
        out["zeta"] = zeta;
        out["estimate"] = to_json(calm_modulus(Phi, base_p, point, zeta, mo).est);
      }
    } else if (kind == "lipusc") {
      out["estimate"] = to_json(lipusc_modulus(Phi, base_p, mo).est);
    } else if (kind == "liploc") {
      out["estimate"] = to_json(liploc_modulus(Phi, base_p, mo).est);
    } else {
      throw InputError(path + ".params.kind: expected liplsc, calm, lipusc or liploc");
    }
    return out;
  }
  if (op == "joint_lipschitz") return {{"estimate", to_json(joint_lipschitz(inst, mo))}};
  if (op == "parametric_lipschitz") return {{"estimate", to_json(parametric_lipschitz(inst, mo))}};
  if (op == "value_profile") {
    std::vector<Vector> ps;
    if (P.contains("ps")) {
      ps = Reader(P.at("ps"), path + ".params.ps").vectors();
      for (const auto& p : ps) {
        if (p.size() != inst.p_dim()) throw InputError(path + ".params.ps: dimension mismatch");
      }
    } else {
      if (inst.p_dim() != 1) throw InputError(path + ".params: from/to/n sweeps need p_dim = 1");
      const double lo = param_num(P, "from", inst.p_window().lo[0]);
      const double hi = param_num(P, "to", inst.p_window().hi[0]);
      const long long n = P.value("n", 11LL);
      if (n < 1 || n > 100000) throw InputError(path + ".params.n: must lie in [1,100000]");
      for (long long i = 0; i < n; ++i) ps.push_back(make_vector({n == 1 ? lo : lo + (hi - lo) * i / (n - 1)}));
    }
    Json samples = Json::array();
    for (const auto& v : value_profile(inst, *is.objective, ps)) {
      Json j = to_json(v.result);
      j["p"] = to_json(v.p);
      samples.push_back(std::move(j));
    }
    return {{"samples", std::move(samples)}};
  }
  if (op == "val_report") {
    auto region = param_box(P, "tau_region", path);
    if (!region) region = is.tau_region;
    return to_json(val_calmness_report(inst, *is.objective, region));
  }
  if (op == "increase") {
    if (!P.contains("alpha")) throw InputError(path + ".params.alpha: missing required field");
    const double alpha = P.at("alpha").get<double>();
    if (!(alpha > 1.0)) throw InputError(path + ".params.alpha: alpha must exceed 1");
    const auto check = increase_check(is, P.value("variant", std::string("global")), param_num(P, "delta", 0.2), path);
    return {{"certificate", to_json(check(alpha))}};
  }
  if (op == "largest_alpha") {
    const auto check = increase_check(is, P.value("variant", std::string("global")), param_num(P, "delta", 0.2), path);
    const double cap = param_num(P, "cap", 10.0);
    if (!(cap > 1.0)) throw InputError(path + ".params.cap: must exceed 1");
    const double alpha = largest_certified_alpha([&](double v) { return check(v).valid(); }, cap, 30);
    return {{"alpha", to_json_number(alpha)}, {"flags", {"sampled_lattice"}}};
  }
  if (op == "fan_bound") {
    const auto* m = std::get_if<FanMap>(&inst.map().repr());
    if (!m) throw InputError(path + ": fan_bound needs a fan map");
    const long long n = P.value("sample_n", 512LL);
    if (n < 0 || n > 1000000) throw InputError(path + ".params.sample_n: out of range");
    return to_json(fan_increase_bound(m->matrices, inst.cone(), static_cast<int>(n), s.seed));
  }
  if (op == "excess_identities") {
    if (!P.contains("set")) throw InputError(path + ".params.set: missing required field");
    const ConvexBody S = read_body(Reader(P.at("set"), path + ".params.set"));
    const double r = param_num(P, "r", 0.5);
    const ExcessIdentities e = excess_identities_check(S, inst.cone(), r);
    auto ident = [](const IdentityCheck& c) {
      return Json{{"applicable", c.applicable}, {"lhs", to_json_number(c.lhs)}, {"rhs", to_json_number(c.rhs)}};
    };
    return {{"base_excess", to_json_number(e.base_excess)},
            {"cone_sum", ident(e.cone_sum)},
            {"enlarged", ident(e.enlarged)},
            {"note", e.note}};
  }
  const CertifyOptions co = certify_options(is, P, path);
  if (op == "certify_liplsc") return reports_json({certify_liplsc(inst, co)});
  if (op == "certify_calm") return reports_json({certify_calm(inst, co)});
  if (op == "certify_lipusc") return reports_json({certify_lipusc(inst, co)});
  if (op == "certify_val") return reports_json(certify_val(inst, *is.objective, co));
  if (op == "certify_increase_slope") return reports_json(certify_increase_slope(inst, co));
  throw InputError(path + ": unknown analysis op '" + op + "'");
}

}  // namespace

RunResult run_spec(const SpecFile& spec, const RunOptions& opt) {
  if (opt.command != "analyze" && opt.command != "certify" && opt.command != "sweep") {
    throw InputError("unknown command '" + opt.command + "'");
  }
  for (const auto& id : opt.only) {
    const bool found = std::any_of(spec.analyses.begin(), spec.analyses.end(),
                                   [&](const AnalysisSpec& a) { return a.id == id; });
    if (!found) throw InputError("--only: unknown analysis id '" + id + "'");
  }
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < spec.analyses.size(); ++i) {
    const auto& a = spec.analyses[i];
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), a.id) == opt.only.end()) continue;
    const OpClass c = op_class(a.op);
    if (opt.command == "analyze" && c != OpClass::analyze) continue;
    if (opt.command == "certify" && c != OpClass::certify) continue;
    selected.push_back(i);
  }

  std::vector<Json> results(selected.size());
  std::vector<double> millis(selected.size(), 0.0);
  std::vector<std::exception_ptr> errors(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < selected.size(); k = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        results[k] = run_one(spec, spec.analyses[selected[k]], selected[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
      millis[k] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int jobs = std::clamp(opt.jobs, 1, 64);
  if (jobs == 1 || selected.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(selected.size())); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunResult out;
  std::map<std::string, int> counts{{"consistent", 0}, {"vacuous", 0}, {"violated", 0}, {"not_evaluable", 0}};
  Json arr = Json::array();
  for (std::size_t k = 0; k < selected.size(); ++k) {
    const auto& a = spec.analyses[selected[k]];
    const Json timing = opt.timings ? Json(std::round(millis[k] * 1000.0) / 1000.0) : Json(nullptr);
    Json& res = results[k];
    if (res.contains("reports")) {
      for (auto& r : res["reports"]) {
        const std::string v = r["verdict"].get<std::string>();
        ++counts[v];
        if (v == "violated") out.violated = true;
        r["timings"] = timing;
      }
    }
    arr.push_back({{"id", a.id}, {"op", a.op}, {"instance", a.instance}, {"result", std::move(res)}, {"timing_ms", timing}});
  }
  Json report;
  report["tool"] = "svi";
  report["version"] = SVI_VERSION;
  report["command"] = opt.command;
  report["input_hash"] = spec.input_hash;
  report["seed"] = spec.settings.seed;
  report["results"] = std::move(arr);
  report["summary"] = {{"analyses", selected.size()},
                       {"consistent", counts["consistent"]},
                       {"vacuous", counts["vacuous"]},
                       {"violated", counts["violated"]},
                       {"not_evaluable", counts["not_evaluable"]}};
  out.report = std::move(report);
  return out;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

namespace {

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "nan";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "+inf") return "inf";
    return s;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
  return buf;
}

std::string levels_csv(const Json& est) {
  std::string out = "scale,value\n";
  for (const auto& l : est.at("levels")) out += csv_cell(l.at("scale")) + "," + csv_cell(l.at("value")) + "\n";
  return out;
}

}  // namespace

std::string emit_csv(const Json& report, const std::string& series) {
  const auto colon = series.find(':');
  const std::string id = series.substr(0, colon);
  const std::optional<std::string> key =
      colon == std::string::npos ? std::nullopt : std::optional<std::string>(series.substr(colon + 1));
  const Json* res = nullptr;
  for (const auto& r : report.at("results")) {
    if (r.at("id") == id) res = &r.at("result");
  }
  // analysis ids may themselves contain ':' (the default op:instance form)
  if (!res && key) {
    for (const auto& r : report.at("results")) {
      if (r.at("id") == series) return emit_csv(report, series + ":");
    }
  }
  if (!res) throw InputError("unknown series '" + series + "'");
  const bool keyed = key && !key->empty();

  if (!keyed && res->contains("samples")) {
    const auto& samples = res->at("samples");
    std::size_t pd = samples.empty() ? 1 : samples.front().at("p").size();
    std::string out;
    for (std::size_t i = 0; i < pd; ++i) out += pd == 1 ? "p," : "p" + std::to_string(i + 1) + ",";
    out += "val\n";
    for (const auto& s : samples) {
      for (const auto& c : s.at("p")) out += csv_cell(c) + ",";
      out += csv_cell(s.at("val")) + "\n";
    }
    return out;
  }
  if (!keyed && res->contains("estimate")) return levels_csv(res->at("estimate"));
  if (res->contains("reports")) {
    const auto& reps = res->at("reports");
    if (!keyed && reps.size() == 1) return levels_csv(reps.front().at("empirical"));
    if (keyed) {
      for (const auto& r : reps) {
        if (r.at("theorem") == *key) return levels_csv(r.at("empirical"));
      }
    }
    throw InputError("series '" + series + "' needs a theorem key, e.g. " + id + ":" +
                     reps.front().at("theorem").get<std::string>());
  }
  if (keyed && res->contains(*key) && res->at(*key).is_object() && res->at(*key).contains("levels")) {
    return levels_csv(res->at(*key));
  }
  throw InputError("series '" + series + "' has no level or sample data");
}

}  // namespace svi
