#include "svi/slopes.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace svi {

namespace {

constexpr double kSphereScales[] = {0.25, 0.5, 1.0};

void check_schedule(const std::vector<double>& sched, const char* what, double floor) {
  if (sched.empty()) throw InputError(std::string(what) + " schedule is empty");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (!(sched[i] >= floor)) throw InputError(std::string(what) + " schedule entries must be >= " + std::to_string(floor));
    if (i > 0 && !(sched[i] < sched[i - 1])) throw InputError(std::string(what) + " schedule must strictly decrease");
  }
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v);
  for (double& r : out) r *= s;
  return out;
}

// Radii for a point of the band {eps > psi - psi(xbar) > 0}: a point with
// excess v lies at distance >= v/L from the lower level set, so scaling by v
// keeps the inner shells short of that boundary for L up to 1/(4 r_min).
std::vector<double> band_radii(const std::vector<double>& radii, double eps, double v) {
  return scaled(radii, std::min(eps, v));
}

// Strong slope without schedule validation, for internally rescaled radii.
Estimate strong_slope_raw(const ScalarFn& psi, const Vector& x, const std::vector<double>& radii,
                          const std::vector<Vector>& dirs, const Tolerances& tol) {
  const double f0 = psi(x);
  if (!std::isfinite(f0)) throw InputError("strong slope needs psi(x) finite");
  Estimate est;
  std::vector<double> raw_max;
  for (double r : radii) {
    double best = 0.0;
    double raw = -kInf;
    for (double s : kSphereScales) {
      const double h = r * s;
      for (const auto& d : dirs) {
        const double fu = psi(x + h * d);
        double q = std::isnan(fu) ? -kInf : (f0 - fu) / h;
        raw = std::max(raw, q);
        best = std::max(best, q);
      }
    }
    est.levels.push_back({r, best});
    raw_max.push_back(raw);
  }
  const auto n = raw_max.size();
  const bool minimizer = n >= 2 ? (raw_max[n - 1] <= tol.slope && raw_max[n - 2] <= tol.slope)
                                : (n == 1 && raw_max[0] <= tol.slope);
  if (minimizer) {
    est.value = 0.0;
    est.verdict = Convergence::converged;
    est.flags.push_back("local_minimizer");
    return est;
  }
  finalize(est, 2, tol);
  return est;
}

void mark_empty_band(Estimate& est) {
  if (!est.levels.empty() && !std::isfinite(est.levels.back().value)) {
    est.value = kInf;
    est.verdict = Convergence::inconclusive;
    est.flags.push_back("empty_band");
  }
}

}  // namespace

int grid_per_axis(int dim, int grid_n) {
  int n = grid_n;
  if (dim == 2) n = std::min(n, 21);
  else if (dim == 3) n = std::min(n, 9);
  else if (dim >= 4) n = std::min(n, 7);
  n = std::max(n, 3);
  return n % 2 == 1 ? n : n + 1;  // odd, so the center is a lattice point
}

ScalarFn phi_in_x(const InclusionInstance& inst, const Vector& p) {
  ScalarFn f;
  f.eval = [&inst, p](const Vector& x) { return inst.phi(p, x); };
  return f;
}

Estimate strong_slope(const ScalarFn& psi, const Vector& x, const std::vector<double>& radii, int dirs_n,
                      const Tolerances& tol) {
  check_schedule(radii, "radius", 1e-6);
  return strong_slope_raw(psi, x, radii, unit_directions(static_cast<int>(x.size()), dirs_n), tol);
}

double exact_slope_convex(const ScalarFn& psi, const Vector& x) {
  if (!psi.subdiff_dist) throw InputError("exact slope needs a subdifferential-distance oracle");
  return psi.subdiff_dist(x);
}

Estimate strict_outer_slope(const ScalarFn& psi, const Vector& xbar, const std::vector<double>& eps_schedule,
                            int grid_n, const Settings& s) {
  check_schedule(eps_schedule, "epsilon", 1e-6);
  const double f0 = psi(xbar);
  if (!std::isfinite(f0)) throw InputError("strict outer slope needs psi(xbar) finite");
  const int dim = static_cast<int>(xbar.size());
  const auto dirs = unit_directions(dim, dim == 1 ? 2 : s.sched.dirs_n);
  const int per_axis = grid_per_axis(dim, grid_n);

  Estimate est;
  for (double eps : eps_schedule) {
    double inf = kInf;
    for (const auto& x : ball_grid(xbar, eps, per_axis)) {
      const double fx = psi(x);
      if (!(fx > f0 + s.tol.membership && fx < f0 + eps)) continue;
      inf = std::min(inf, strong_slope_raw(psi, x, band_radii(s.sched.radii, eps, fx - f0), dirs, s.tol).value);
    }
    est.levels.push_back({eps, inf});
  }
  finalize(est, 2, s.tol);
  mark_empty_band(est);
  return est;
}

Estimate partial_strict_outer_slope(const InclusionInstance& inst, const std::vector<double>& eps_schedule,
                                    int grid_n) {
  check_schedule(eps_schedule, "epsilon", 1e-6);
  const auto& s = inst.settings();
  const double f0 = inst.phi(inst.pbar(), inst.xbar());
  if (f0 > s.tol.membership) throw InputError("partial strict outer slope needs phi(pbar,xbar) = 0");
  const auto dirs = unit_directions(inst.x_dim(), inst.x_dim() == 1 ? 2 : s.sched.dirs_n);
  // 1+1 dimensions keep the full 1-D lattice; larger products share the joint cap
  const int joint = inst.p_dim() + inst.x_dim();
  const int gp = grid_per_axis(joint == 2 ? 1 : joint, grid_n);
  const int gx = gp;

  Estimate est;
  for (double eps : eps_schedule) {
    const auto xs = ball_grid(inst.xbar(), eps, gx);
    double inf = kInf;
    for (const auto& p : ball_grid(inst.pbar(), eps, gp)) {
      const ScalarFn psi = phi_in_x(inst, p);
      for (const auto& x : xs) {
        const double v = psi(x);
        if (!(v > s.tol.membership && v < eps)) continue;
        inf = std::min(inf, strong_slope_raw(psi, x, band_radii(s.sched.radii, eps, v), dirs, s.tol).value);
      }
    }
    est.levels.push_back({eps, inf});
  }
  finalize(est, 2, s.tol);
  mark_empty_band(est);
  return est;
}

Estimate partial_strict_outer_slope(const InclusionInstance& inst) {
  return partial_strict_outer_slope(inst, inst.settings().sched.eps, inst.settings().sched.grid_n);
}

Estimate tau(const InclusionInstance& inst, const Box& region, int grid_n) {
  if (region.dim() != inst.x_dim()) throw InputError("tau region dimension differs from x");
  if (!region.lo.allFinite() || !region.hi.allFinite()) throw InputError("tau region must be a bounded box");
  const auto& s = inst.settings();
  const int dim = inst.x_dim();
  const ScalarFn psi = phi_in_x(inst, inst.pbar());
  const auto dirs = unit_directions(dim, dim == 1 ? 2 : s.sched.dirs_n);

  std::vector<Vector> pts = box_grid(region, grid_per_axis(dim, grid_n));

  std::optional<SolutionSlice> slice;
  std::vector<Vector> feasible_pts;
  if (dim == 1 && region.lo[0] < region.hi[0]) {
    slice = solve_slice_1d(inst.map(), inst.cone(), inst.pbar(), region.lo[0], region.hi[0],
                           std::max(grid_n, 16), s.tol);
    // approach each finite boundary point of Solv(pbar) from the infeasible side
    for (const auto& pc : slice->pieces) {
      for (int k = 1; k <= 6; ++k) {
        const double h = std::pow(10.0, -k);
        if (!pc.lo_clipped && pc.lo - h >= region.lo[0]) pts.push_back(make_vector({pc.lo - h}));
        if (!pc.hi_clipped && pc.hi + h <= region.hi[0]) pts.push_back(make_vector({pc.hi + h}));
      }
    }
  } else {
    for (const auto& x : pts) {
      if (psi(x) <= s.tol.membership) feasible_pts.push_back(x);
    }
  }
  auto distance = [&](const Vector& x) {
    if (slice) return slice->distance(x[0]);
    double d = kInf;
    for (const auto& f : feasible_pts) d = std::min(d, (x - f).norm());
    return 0.5 * d;
  };

  const std::size_t nl = s.sched.radii.size();
  std::vector<double> level_inf(nl, kInf);
  bool any = false;
  for (const auto& x : pts) {
    if (!(psi(x) > s.tol.membership)) continue;
    any = true;
    const double scale = std::min(1.0, distance(x));
    const Estimate e = strong_slope_raw(psi, x, scaled(s.sched.radii, scale), dirs, s.tol);
    const bool minimizer = e.has_flag("local_minimizer");
    for (std::size_t j = 0; j < nl; ++j) level_inf[j] = std::min(level_inf[j], minimizer ? 0.0 : e.levels[j].value);
  }

  Estimate est;
  for (std::size_t j = 0; j < nl; ++j) est.levels.push_back({s.sched.radii[j], level_inf[j]});
  est.flags.push_back("region_restricted");
  if (!any) {
    est.value = kInf;
    est.verdict = Convergence::inconclusive;
    est.flags.push_back("no_infeasible_point");
    return est;
  }
  finalize(est, 2, s.tol);
  return est;
}

}  // namespace svi
