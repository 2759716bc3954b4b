#include "svi/parametric.hpp"

#include "svi/slopes.hpp"

#include <algorithm>
#include <cmath>

namespace svi {

Objective Objective::from_expression(Expression e, std::optional<double> lip_hint) {
  Objective o;
  o.expr = e;
  o.eval = [e = std::move(e)](const Vector& p, const Vector& x) { return e.eval(p, x); };
  o.lip_hint = lip_hint;
  return o;
}

std::string_view to_string(ValueStatus s) {
  switch (s) {
    case ValueStatus::attained: return "attained";
    case ValueStatus::unbounded_below: return "unbounded_below";
    case ValueStatus::infeasible: return "infeasible";
  }
  return "?";
}

namespace {

constexpr int kScanPoints = 64;
constexpr double kGolden = 0.6180339887498949;

struct Candidate {
  double x;
  double v;
};

Candidate golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

// theta keeps strictly decreasing along feasible points past the window edge.
bool decreases_past_edge(const InclusionInstance& inst, const std::function<double(double)>& f, const Vector& p,
                         double edge, double outward, double span) {
  double prev = f(edge);
  for (int k = 0; k < 6; ++k) {
    const double t = edge + outward * span * std::ldexp(1.0, k);
    if (!(inst.phi(p, make_vector({t})) <= inst.settings().tol.membership)) return false;
    const double v = f(t);
    if (!(v < prev - 1e-12 * (1.0 + std::abs(prev)))) return false;
    prev = v;
  }
  return true;
}

}  // namespace

ValueResult value_at(const InclusionInstance& inst, const Objective& theta, const Vector& p) {
  if (inst.x_dim() != 1) throw InputError("value analysis needs a one-dimensional x");
  const auto& tol = inst.settings().tol;
  const SolutionSlice slice = solve_slice_1d(inst, p);
  ValueResult out;
  if (slice.empty()) {
    out.val = kInf;
    out.status = ValueStatus::infeasible;
    return out;
  }
  auto f = [&](double t) { return theta(p, make_vector({t})); };
  const double span = std::max(slice.window_hi - slice.window_lo, 1.0);

  std::vector<Candidate> cands;
  bool clipped_min = false;
  for (const auto& pc : slice.pieces) {
    Candidate best{pc.lo, f(pc.lo)};
    const double w = pc.hi - pc.lo;
    if (w > 1e-14) {
      int bi = 0;
      std::vector<double> xs(kScanPoints), vs(kScanPoints);
      for (int i = 0; i < kScanPoints; ++i) {
        xs[i] = i + 1 == kScanPoints ? pc.hi : pc.lo + w * i / (kScanPoints - 1);
        vs[i] = f(xs[i]);
        if (vs[i] < vs[bi]) bi = i;
      }
      best = {xs[bi], vs[bi]};
      const double a = xs[std::max(bi - 1, 0)];
      const double b = xs[std::min(bi + 1, kScanPoints - 1)];
      const Candidate g = golden_section(f, a, b, tol.value);
      if (g.v < best.v) best = g;
    }
    const double edge_tol = 1e-9 * (1.0 + std::abs(best.x));
    if (pc.lo_clipped && best.x - pc.lo <= std::max(edge_tol, tol.value)) {
      if (decreases_past_edge(inst, f, p, pc.lo, -1.0, span)) {
        out.val = -kInf;
        out.status = ValueStatus::unbounded_below;
        out.flags.push_back("unbounded_by_edge_test");
        return out;
      }
      clipped_min = true;
    }
    if (pc.hi_clipped && pc.hi - best.x <= std::max(edge_tol, tol.value)) {
      if (decreases_past_edge(inst, f, p, pc.hi, 1.0, span)) {
        out.val = -kInf;
        out.status = ValueStatus::unbounded_below;
        out.flags.push_back("unbounded_by_edge_test");
        return out;
      }
      clipped_min = true;
    }
    cands.push_back(best);
  }
  double v = kInf;
  for (const auto& c : cands) v = std::min(v, c.v);
  out.val = v;
  out.status = ValueStatus::attained;
  for (const auto& c : cands) {
    if (c.v <= v + tol.value * (1.0 + std::abs(v))) out.argmin.push_back(make_vector({c.x}));
  }
  if (clipped_min) out.flags.push_back("minimizer_on_window_edge");
  return out;
}

std::vector<ValueSample> value_profile(const InclusionInstance& inst, const Objective& theta,
                                       const std::vector<Vector>& ps) {
  std::vector<ValueSample> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back({p, value_at(inst, theta, p)});
  return out;
}

Estimate objective_upper_calmness(const Objective& theta, const Vector& pbar, const Vector& xbar,
                                  const ModulusOptions& opt) {
  const int np = static_cast<int>(pbar.size());
  const int nx = static_cast<int>(xbar.size());
  Vector z0(np + nx);
  z0 << pbar, xbar;
  const double f0 = theta(pbar, xbar);
  if (!std::isfinite(f0)) throw InputError("objective is not finite at the reference point");
  const int per_axis = np + nx <= 2 ? 9 : 5;
  Estimate est;
  for (double d : opt.deltas) {
    double sup = 0.0;
    for (const auto& z : box_grid(Box::around(z0, d), per_axis)) {
      const double dist = (z - z0).lpNorm<Eigen::Infinity>();
      if (dist < d * (1.0 - 1e-12)) continue;  // surface of the max-metric ball only
      const double v = theta(z.head(np), z.tail(nx));
      sup = std::max(sup, std::isnan(v) ? kInf : std::max(0.0, v - f0) / d);
    }
    est.levels.push_back({d, sup});
  }
  finalize(est, 3, opt.tol);
  return est;
}

Estimate objective_lipschitz(const Objective& theta, const Box& p_window, const Box& x_window, std::uint64_t seed,
                             const Tolerances& tol) {
  const int np = p_window.dim();
  const int nx = x_window.dim();
  Box box{Vector(np + nx), Vector(np + nx)};
  box.lo << p_window.lo, x_window.lo;
  box.hi << p_window.hi, x_window.hi;
  if (!box.lo.allFinite() || !box.hi.allFinite()) throw InputError("objective Lipschitz estimate needs bounded windows");
  const double hw = std::max(box.half_width(), 1e-12);
  Rng rng(seed ^ 0x7E7A11ULL);
  auto draw = [&] {
    Vector z(np + nx);
    for (int i = 0; i < np + nx; ++i) z[i] = rng.uniform(box.lo[i], box.hi[i]);
    return z;
  };
  Estimate est;
  double overall = 0.0;
  for (double s : {1.0, 1e-1, 1e-2, 1e-3}) {
    double sup = 0.0;
    for (int k = 0; k < 256; ++k) {
      const Vector a = draw();
      Vector b(np + nx);
      for (int i = 0; i < np + nx; ++i) {
        b[i] = std::clamp(a[i] + s * hw * rng.uniform(-1.0, 1.0), box.lo[i], box.hi[i]);
      }
      const double d = (a - b).lpNorm<Eigen::Infinity>();
      if (d < 1e-14) continue;
      const double q = std::abs(theta(a.head(np), a.tail(nx)) - theta(b.head(np), b.tail(nx))) / d;
      sup = std::max(sup, std::isnan(q) ? kInf : q);
    }
    est.levels.push_back({s * hw, sup});
    overall = std::max(overall, sup);
  }
  est.verdict = classify_levels(est.levels, 2, tol);
  est.value = overall;
  est.flags.push_back("window_sampled");
  return est;
}

std::optional<double> ratio_bound(double c, double num, double den, double positivity, std::string* why) {
  auto fail = [why](const char* msg) -> std::optional<double> {
    if (why) *why = msg;
    return std::nullopt;
  };
  if (!std::isfinite(c)) return fail("objective modulus is not finite");
  if (!std::isfinite(num)) return fail("modulus of F is not finite");
  if (!(den > positivity)) return fail("slope constant is not positive");
  const double r = std::isinf(den) ? 0.0 : num / den;
  return c * std::max(1.0, r);
}

namespace {

double usable(const Estimate& e) {
  return e.verdict == Convergence::diverging ? kInf : e.value;
}

Estimate hint_estimate(double v) {
  Estimate e;
  e.value = v;
  e.verdict = Convergence::converged;
  e.flags.push_back("hint");
  return e;
}

ValBound make_bound(std::string id, double c, double num, double den, double positivity) {
  ValBound b;
  b.id = std::move(id);
  b.value = ratio_bound(c, num, den, positivity, &b.note);
  return b;
}

}  // namespace

ValCalmnessReport val_calmness_report(const InclusionInstance& inst, const Objective& theta,
                                      const std::optional<Box>& tau_region) {
  const auto& s = inst.settings();
  const auto opt = ModulusOptions::from(s);
  ValCalmnessReport rep;
  rep.at_pbar = value_at(inst, theta, inst.pbar());
  const double tb = theta(inst.pbar(), inst.xbar());
  if (rep.at_pbar.status != ValueStatus::attained ||
      std::abs(tb - rep.at_pbar.val) > 1e-6 * (1.0 + std::abs(rep.at_pbar.val))) {
    throw InputError("instance '" + inst.id() + "': xbar is not a minimizer of the objective over Solv(pbar)");
  }
  rep.empirical = scalar_calm_moduli([&](const Vector& p) { return value_at(inst, theta, p).val; }, inst.pbar(), opt);

  rep.theta_ucalm = objective_upper_calmness(theta, inst.pbar(), inst.xbar(), opt);
  if (theta.lip_hint) {
    rep.theta_lip = hint_estimate(*theta.lip_hint);
    rep.theta_lip_from_hint = true;
  } else {
    rep.theta_lip = objective_lipschitz(theta, inst.p_window(), inst.x_window(), s.seed, s.tol);
  }
  rep.lipusc_F = lipusc_modulus(ParamSetMap::map_in_p(inst.map(), inst.xbar()), inst.pbar(), opt).est;
  rep.sostslx = partial_strict_outer_slope(inst);
  if (inst.map().traits.lipschitz_p_hint) {
    rep.lip_p = hint_estimate(*inst.map().traits.lipschitz_p_hint);
    rep.lip_p_from_hint = true;
  } else {
    rep.lip_p = parametric_lipschitz(inst, opt);
  }
  rep.tau_region = tau_region.value_or(inst.x_window());
  rep.tau = tau(inst, rep.tau_region, s.sched.grid_n);

  const double pos = s.tol.positivity;
  rep.ucalm_bound = make_bound("4.1", usable(rep.theta_ucalm), usable(rep.lipusc_F), rep.sostslx.value, pos);
  rep.lcalm_bound = make_bound("4.2", usable(rep.theta_lip), usable(rep.lip_p), rep.tau.value, pos);
  rep.calm_bound = make_bound("4.3", usable(rep.theta_lip), usable(rep.lip_p), std::min(rep.sostslx.value, rep.tau.value),
                         pos);
  return rep;
}

}  // namespace svi
