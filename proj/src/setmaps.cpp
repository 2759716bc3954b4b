#include "svi/setmaps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double selected(Variable v, const Vector& p, const Vector& x) {
  const Vector& s = v == Variable::p ? p : x;
  if (s.size() < 1) throw InputError("map argument has dimension 0");
  return s[0];
}

Vector fan_point(const FanMap& m, const Matrix& L, const Vector& p, const Vector& x) {
  Vector y = L * x;
  if (m.p_matrix) y += *m.p_matrix * p;
  return y;
}

}  // namespace

std::string_view to_string(TraitStatus s) {
  switch (s) {
    case TraitStatus::holds: return "holds";
    case TraitStatus::assumed: return "assumed";
    case TraitStatus::fails: return "fails";
  }
  return "assumed";
}

SetMap SetMap::epigraph(Expression f) {
  Expression copy = f;
  EpigraphMap m;
  m.f = [e = std::move(copy)](const Vector& p, const Vector& x) { return e.eval(p, x); };
  m.expr = std::move(f);
  return SetMap(std::move(m));
}

SetMap SetMap::epigraph(ScalarField f) {
  if (!f) throw InputError("epigraph map needs a function");
  return SetMap(EpigraphMap{std::move(f), std::nullopt});
}

SetMap SetMap::fan(std::vector<Matrix> matrices, std::optional<Matrix> p_matrix) {
  if (matrices.empty()) throw InputError("fan map needs at least one matrix");
  const auto rows = matrices.front().rows();
  const auto cols = matrices.front().cols();
  for (const auto& L : matrices) {
    if (L.rows() != rows || L.cols() != cols) throw InputError("fan matrices must share one shape");
    if (!L.allFinite()) throw InputError("fan matrix has non-finite entries");
  }
  if (rows < 1 || rows > kMaxDim || cols < 1 || cols > kMaxDim) throw InputError("fan matrix shape outside 1..4");
  if (p_matrix && (p_matrix->rows() != rows || !p_matrix->allFinite())) {
    throw InputError("fan p_matrix must have as many rows as the fan matrices");
  }
  return SetMap(FanMap{std::move(matrices), std::move(p_matrix)});
}

SetMap SetMap::constant(const ConvexBody& S) { return SetMap(ConstantMap{std::make_shared<const ConvexBody>(S)}); }

SetMap SetMap::sqrt_interval(Variable v) { return SetMap(SqrtIntervalMap{v}); }

SetMap SetMap::halfline_sign(Variable v) { return SetMap(HalflineSignMap{v}); }

SetMap SetMap::custom(std::function<ConvexBody(const Vector&, const Vector&)> eval, int y_dim) {
  if (!eval) throw InputError("custom map needs an evaluator");
  if (y_dim < 1 || y_dim > kMaxDim) throw InputError("custom map y_dim outside 1..4");
  return SetMap(CustomMap{std::move(eval), y_dim});
}

std::optional<Interval> SetMap::evaluate_interval(const Vector& p, const Vector& x) const {
  return std::visit(
      overloaded{
          [&](const EpigraphMap& m) -> std::optional<Interval> {
            const double v = m.f(p, x);
            if (!std::isfinite(v)) throw InstanceError("epigraph function is not finite at the queried point");
            return Interval{v, kInf};
          },
          [&](const FanMap& m) -> std::optional<Interval> {
            if (m.matrices.front().rows() != 1) return std::nullopt;
            Interval out{kInf, -kInf};
            for (const auto& L : m.matrices) {
              const double y = fan_point(m, L, p, x)[0];
              out.lo = std::min(out.lo, y);
              out.hi = std::max(out.hi, y);
            }
            return out;
          },
          [&](const ConstantMap& m) -> std::optional<Interval> { return m.set->hull1d(); },
          [&](const SqrtIntervalMap& m) -> std::optional<Interval> {
            const double s = std::sqrt(std::abs(selected(m.var, p, x)));
            return Interval{-s, s};
          },
          [&](const HalflineSignMap& m) -> std::optional<Interval> {
            const double t = selected(m.var, p, x);
            if (t < 0.0) return Interval{-kInf, 0.0};
            if (t > 0.0) return Interval{0.0, kInf};
            return Interval{-kInf, kInf};
          },
          [&](const CustomMap&) -> std::optional<Interval> { return std::nullopt; },
      },
      repr_);
}

ConvexBody SetMap::evaluate(const Vector& p, const Vector& x) const {
  if (const auto* m = std::get_if<FanMap>(&repr_)) {
    if (x.size() != m->matrices.front().cols()) throw InputError("fan map: x dimension mismatch");
    if (m->p_matrix && p.size() != m->p_matrix->cols()) throw InputError("fan map: p dimension mismatch");
    std::vector<Vector> pts;
    pts.reserve(m->matrices.size());
    for (const auto& L : m->matrices) pts.push_back(fan_point(*m, L, p, x));
    for (const auto& y : pts) {
      if (!y.allFinite()) throw InstanceError("fan map produced non-finite points");
    }
    return ConvexBody::polytope(std::move(pts));
  }
  if (const auto* m = std::get_if<ConstantMap>(&repr_)) return *m->set;
  if (const auto* m = std::get_if<CustomMap>(&repr_)) {
    ConvexBody b = [&] {
      try {
        return m->eval(p, x);
      } catch (const InputError& e) {
        throw InstanceError(std::string("custom map evaluation failed: ") + e.what());
      }
    }();
    if (b.dim() != m->y_dim) throw InstanceError("custom map returned a set of the wrong dimension");
    return b;
  }
  const Interval iv = *evaluate_interval(p, x);
  return ConvexBody::interval(iv.lo, iv.hi);
}

int SetMap::y_dim() const {
  return std::visit(overloaded{
                        [](const FanMap& m) { return static_cast<int>(m.matrices.front().rows()); },
                        [](const ConstantMap& m) { return m.set->dim(); },
                        [](const CustomMap& m) { return m.y_dim; },
                        [](const auto&) { return 1; },
                    },
                    repr_);
}

std::string_view SetMap::kind() const {
  static constexpr std::string_view names[] = {"epigraph", "fan", "constant", "sqrt_interval", "halfline_sign",
                                               "custom"};
  return names[repr_.index()];
}

TraitStatus SetMap::lsc_in_x() const {
  return std::visit(overloaded{
                        [](const EpigraphMap& m) {
                          if (m.expr && m.expr->structurally_continuous()) return TraitStatus::holds;
                          return TraitStatus::assumed;
                        },
                        [](const HalflineSignMap& m) {
                          return m.var == Variable::x ? TraitStatus::fails : TraitStatus::holds;
                        },
                        [](const CustomMap&) { return TraitStatus::assumed; },
                        [](const auto&) { return TraitStatus::holds; },
                    },
                    repr_);
}

bool SetMap::p_independent() const {
  return std::visit(overloaded{
                        [](const EpigraphMap& m) { return m.expr && m.expr->p_arity() == 0; },
                        [](const FanMap& m) { return !m.p_matrix.has_value(); },
                        [](const ConstantMap&) { return true; },
                        [](const SqrtIntervalMap& m) { return m.var == Variable::x; },
                        [](const HalflineSignMap& m) { return m.var == Variable::x; },
                        [](const CustomMap&) { return false; },
                    },
                    repr_);
}

bool SetMap::positively_homogeneous_in_x() const {
  const auto* m = std::get_if<FanMap>(&repr_);
  return m && !m->p_matrix;
}

// ---------------------------------------------------------------------------

double phi(const SetMap& F, const ConeSpec& C, const Vector& p, const Vector& x) {
  if (C.dim() == 1) {
    if (auto iv = F.evaluate_interval(p, x)) return excess(*iv, *C.body().hull1d());
  }
  if (const auto* m = std::get_if<FanMap>(&F.repr())) {
    // conv of the images; the distance to C is convex, so its max sits at an image
    if (m->matrices.front().rows() != C.dim()) throw InputError("map value and cone have different dimensions");
    double e = 0.0;
    for (const auto& L : m->matrices) {
      const Vector y = fan_point(*m, L, p, x);
      if (!y.allFinite()) throw InstanceError("fan map produced non-finite points");
      e = std::max(e, C.dist(y));
    }
    return e;
  }
  const ConvexBody S = F.evaluate(p, x);
  if (S.dim() != C.dim()) throw InputError("map value and cone have different dimensions");
  return excess(S, C.h_body());
}

bool in_solution(const SetMap& F, const ConeSpec& C, const Vector& p, const Vector& x, const Tolerances& tol) {
  return phi(F, C, p, x) <= tol.membership;
}

bool SolutionSlice::contains(double x, double tol) const { return distance(x) <= tol; }

double SolutionSlice::distance(double x) const {
  double best = kInf;
  for (const auto& iv : extended()) best = std::min(best, iv.dist(x));
  return best;
}

std::vector<Interval> SolutionSlice::extended() const {
  std::vector<Interval> out;
  out.reserve(pieces.size());
  for (const auto& pc : pieces) out.push_back({pc.lo_clipped ? -kInf : pc.lo, pc.hi_clipped ? kInf : pc.hi});
  return out;
}

SolutionSlice solve_slice_1d(const SetMap& F, const ConeSpec& C, const Vector& p, double lo, double hi, int grid_n,
                             const Tolerances& tol) {
  if (grid_n < 16) throw InputError("solve_slice_1d needs grid_n >= 16");
  if (!(lo < hi)) throw InputError("solve_slice_1d needs a window with lo < hi");
  auto feasible = [&](double t) { return phi(F, C, p, make_vector({t})) <= tol.slice; };
  // a feasible, b infeasible; returns the feasible side of the transition
  auto boundary = [&](double a, double b) {
    while (std::abs(b - a) > tol.root) {
      const double m = 0.5 * (a + b);
      (feasible(m) ? a : b) = m;
    }
    return a;
  };

  SolutionSlice out;
  out.window_lo = lo;
  out.window_hi = hi;
  std::vector<double> xs(static_cast<std::size_t>(grid_n));
  std::vector<char> ok(xs.size());
  for (int i = 0; i < grid_n; ++i) {
    xs[i] = i == grid_n - 1 ? hi : lo + (hi - lo) * i / (grid_n - 1);
    ok[i] = feasible(xs[i]) ? 1 : 0;
  }
  int i = 0;
  while (i < grid_n) {
    if (!ok[i]) {
      ++i;
      continue;
    }
    const int first = i;
    while (i + 1 < grid_n && ok[i + 1]) ++i;
    const int last = i;
    SlicePiece pc{};
    pc.lo_clipped = first == 0;
    pc.lo = pc.lo_clipped ? lo : boundary(xs[first], xs[first - 1]);
    pc.hi_clipped = last == grid_n - 1;
    pc.hi = pc.hi_clipped ? hi : boundary(xs[last], xs[last + 1]);
    out.pieces.push_back(pc);
    ++i;
  }
  return out;
}

SolutionSlice solve_slice_1d(const InclusionInstance& inst, const Vector& p) {
  if (inst.x_dim() != 1) throw InputError("solution slices need x_dim = 1");
  const auto& s = inst.settings();
  return solve_slice_1d(inst.map(), inst.cone(), p, inst.x_window().lo[0], inst.x_window().hi[0],
                        std::max(s.sched.grid_n, 16), s.tol);
}

// ---------------------------------------------------------------------------

InclusionInstance::InclusionInstance(std::string id, SetMap F, ConeSpec C, Vector pbar, Vector xbar, Box p_window,
                                     Box x_window, Settings settings)
    : id_(std::move(id)),
      F_(std::move(F)),
      C_(std::move(C)),
      pbar_(std::move(pbar)),
      xbar_(std::move(xbar)),
      p_window_(std::move(p_window)),
      x_window_(std::move(x_window)),
      settings_(std::move(settings)) {
  validate();
}

double InclusionInstance::phi(const Vector& p, const Vector& x) const { return svi::phi(F_, C_, p, x); }

bool InclusionInstance::in_solution(const Vector& p, const Vector& x) const {
  return phi(p, x) <= settings_.tol.membership;
}

void InclusionInstance::validate() {
  auto fail = [this](const std::string& msg) { throw InputError("instance '" + id_ + "': " + msg); };
  if (p_dim() < 1 || p_dim() > kMaxDim) fail("p dimension outside 1..4");
  if (x_dim() < 1 || x_dim() > kMaxDim) fail("x dimension outside 1..4");
  if (p_window_.dim() != p_dim()) fail("p_window dimension differs from pbar");
  if (x_window_.dim() != x_dim()) fail("x_window dimension differs from xbar");
  if ((p_window_.lo.array() > p_window_.hi.array()).any()) fail("p_window has lo > hi");
  if ((x_window_.lo.array() > x_window_.hi.array()).any()) fail("x_window has lo > hi");
  if (!p_window_.contains(pbar_, 1e-12)) fail("p_window does not contain pbar");
  if (!x_window_.contains(xbar_, 1e-12)) fail("x_window does not contain xbar");
  if (F_.y_dim() != C_.dim()) fail("map values and cone live in different dimensions");

  if (const auto* m = std::get_if<FanMap>(&F_.repr())) {
    if (m->matrices.front().cols() != x_dim()) fail("fan matrices need one column per x component");
    if (m->p_matrix && m->p_matrix->cols() != p_dim()) fail("fan p_matrix needs one column per p component");
  }
  if (const auto* m = std::get_if<EpigraphMap>(&F_.repr()); m && m->expr) {
    if (m->expr->p_arity() > p_dim()) fail("expression uses more p components than pbar has");
    if (m->expr->x_arity() > x_dim()) fail("expression uses more x components than xbar has");
  }

  double v = 0.0;
  try {
    v = phi(pbar_, xbar_);
  } catch (const InstanceError& e) {
    throw InstanceError("instance '" + id_ + "': " + e.what());
  }
  if (!(v <= settings_.tol.membership)) {
    std::ostringstream os;
    os << "instance '" << id_ << "': reference point is not a solution (phi = " << v << ")";
    throw InstanceError(os.str());
  }
  if (F_.traits.concave_in_x) check_concavity();
}

void InclusionInstance::check_concavity() {
  Rng rng(settings_.seed ^ 0xC0CAC0CAULL);
  const auto dirs = unit_directions(y_dim(), 64);
  auto draw = [&rng](const Box& b) {
    Vector v(b.dim());
    for (int i = 0; i < b.dim(); ++i) v[i] = rng.uniform(b.lo[i], b.hi[i]);
    return v;
  };
  for (int k = 0; k < 64; ++k) {
    const Vector p = draw(p_window_);
    const Vector x1 = draw(x_window_);
    const Vector x2 = draw(x_window_);
    const double t = rng.uniform(0.05, 0.95);
    const ConvexBody mid = F_.evaluate(p, t * x1 + (1.0 - t) * x2);
    const ConvexBody a = F_.evaluate(p, x1);
    const ConvexBody b = F_.evaluate(p, x2);
    for (const auto& d : dirs) {
      const double lhs = support(mid, d);
      const double rhs = t * support(a, d) + (1.0 - t) * support(b, d);
      if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) {
        throw InstanceError("instance '" + id_ + "': concave_in_x flag contradicted by a sampled segment");
      }
    }
  }
}

}  // namespace svi
