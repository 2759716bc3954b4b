#include "svi/moduli.hpp"

#include <algorithm>
#include <cmath>

namespace svi {

namespace {

constexpr int kModulusWindow = 3;

std::vector<Vector> sphere(const Vector& center, double radius, int dirs_n) {
  std::vector<Vector> out;
  for (const auto& d : unit_directions(static_cast<int>(center.size()), dirs_n)) out.push_back(center + radius * d);
  return out;
}

// Lattice in ball(center, radius) that always contains the center and, in 1-D, both ends.
std::vector<Vector> pair_lattice(const Vector& center, double radius, int per_axis) {
  if (center.size() == 1) return box_grid(Box::around(center, radius), per_axis);
  return ball_grid(center, radius, per_axis);
}

double ratio(double num, double den) {
  if (std::isnan(num)) return kInf;
  return num / den;
}

Estimate finish(Estimate est, const Tolerances& tol) {
  finalize(est, kModulusWindow, tol);
  return est;
}

double set_hausdorff(const ConvexBody& a, const ConvexBody& b) { return hausdorff(a, b); }

// H(F(p1,x1), F(p2,x2)) with the interval fast path.
struct MapValue {
  std::optional<Interval> iv;
  std::optional<ConvexBody> body;
};

MapValue value_of(const SetMap& F, const Vector& p, const Vector& x) {
  MapValue v;
  v.iv = F.evaluate_interval(p, x);
  if (!v.iv) v.body = F.evaluate(p, x);
  return v;
}

double value_hausdorff(const MapValue& a, const MapValue& b) {
  if (a.iv && b.iv) return std::max(excess(*a.iv, *b.iv), excess(*b.iv, *a.iv));
  return set_hausdorff(*a.body, *b.body);
}

}  // namespace

// ---------------------------------------------------------------------------
// SetUnion

double SetUnion::dist(const Vector& x) const {
  double d = kInf;
  for (const auto& part : parts) d = std::min(d, dist_point_set(x, part));
  return d;
}

std::vector<Vector> SetUnion::sample_in_ball(const Vector& center, double radius, int grid_n) const {
  std::vector<Vector> out;
  const double lim = radius * (1.0 + 1e-12);
  for (const auto& part : parts) {
    if (dim == 1) {
      const Interval& h = *part.hull1d();
      const double lo = std::max(h.lo, center[0] - radius);
      const double hi = std::min(h.hi, center[0] + radius);
      if (lo > hi) continue;
      out.push_back(make_vector({lo}));
      out.push_back(make_vector({hi}));
      for (int i = 1; i + 1 < grid_n; ++i) out.push_back(make_vector({lo + (hi - lo) * i / (grid_n - 1)}));
      continue;
    }
    const auto& pts = part.vrep().points;
    std::vector<Vector> cand = pts;
    Vector bary = Vector::Zero(dim);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      bary += pts[i];
      for (std::size_t j = i + 1; j < pts.size(); ++j) cand.push_back(0.5 * (pts[i] + pts[j]));
    }
    cand.push_back(bary / static_cast<double>(pts.size()));
    cand.push_back(project(center, part));
    for (auto& c : cand) {
      if ((c - center).norm() <= lim) out.push_back(std::move(c));
    }
  }
  return out;
}

double excess(const SetUnion& A, const SetUnion& B) {
  if (A.empty()) return 0.0;
  if (B.empty()) return kInf;
  if (A.dim != B.dim) throw InputError("excess: dimension mismatch between unions");

  if (A.dim == 1) {
    std::vector<Interval> bs;
    for (const auto& part : B.parts) bs.push_back(*part.hull1d());
    std::sort(bs.begin(), bs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double bmax = -kInf;
    double bmin = kInf;
    for (const auto& b : bs) {
      bmax = std::max(bmax, b.hi);
      bmin = std::min(bmin, b.lo);
    }
    auto dist_b = [&](double t) {
      double d = kInf;
      for (const auto& b : bs) d = std::min(d, b.dist(t));
      return d;
    };
    std::vector<double> gaps;
    double reach = bs.front().hi;
    for (std::size_t i = 1; i < bs.size(); ++i) {
      if (bs[i].lo > reach) gaps.push_back(0.5 * (reach + bs[i].lo));
      reach = std::max(reach, bs[i].hi);
    }
    double e = 0.0;
    for (const auto& part : A.parts) {
      const Interval& a = *part.hull1d();
      if (a.hi == kInf && bmax < kInf) return kInf;
      if (a.lo == -kInf && bmin > -kInf) return kInf;
      if (std::isfinite(a.lo)) e = std::max(e, dist_b(a.lo));
      if (std::isfinite(a.hi)) e = std::max(e, dist_b(a.hi));
      for (double g : gaps) {
        if (a.contains(g)) e = std::max(e, dist_b(g));
      }
    }
    return e;
  }

  double e = 0.0;
  if (B.parts.size() == 1) {
    for (const auto& part : A.parts) e = std::max(e, excess(part, B.parts.front()));
    return e;
  }
  for (const auto& part : A.parts) {
    for (const auto& r : part.vrep().rays) {
      bool escapes = true;
      for (const auto& b : B.parts) escapes = escapes && !in_recession_cone(b, r);
      if (escapes) return kInf;
    }
    for (const auto& v : part.vrep().points) e = std::max(e, B.dist(v));
  }
  return e;
}

double hausdorff(const SetUnion& A, const SetUnion& B) {
  if (A.empty() && B.empty()) return 0.0;
  return std::max(excess(A, B), excess(B, A));
}

// ---------------------------------------------------------------------------
// ParamSetMap

ParamSetMap ParamSetMap::map_in_p(const SetMap& F, const Vector& xbar) {
  ParamSetMap m;
  m.y_dim = F.y_dim();
  m.p_dim = -1;  // any
  m.label = "F(.,xbar)";
  m.eval = [F, xbar, y = m.y_dim](const Vector& p) { return SetUnion{y, {F.evaluate(p, xbar)}}; };
  return m;
}

ParamSetMap ParamSetMap::map_in_x(const SetMap& F, const Vector& pbar) {
  ParamSetMap m;
  m.y_dim = F.y_dim();
  m.p_dim = -1;
  m.label = "F(pbar,.)";
  m.eval = [F, pbar, y = m.y_dim](const Vector& x) { return SetUnion{y, {F.evaluate(pbar, x)}}; };
  return m;
}

ParamSetMap ParamSetMap::solution_map(const InclusionInstance& inst) {
  if (inst.x_dim() != 1) throw InputError("the solution map is reconstructed only for x_dim = 1");
  ParamSetMap m;
  m.p_dim = inst.p_dim();
  m.y_dim = 1;
  m.label = "Solv";
  m.eval = [&inst](const Vector& p) {
    SetUnion u;
    u.dim = 1;
    for (const auto& iv : solve_slice_1d(inst, p).extended()) u.parts.push_back(ConvexBody::interval(iv.lo, iv.hi));
    return u;
  };
  return m;
}

ParamSetMap ParamSetMap::singleton(std::function<Vector(const Vector&)> f, int p_dim, int y_dim) {
  ParamSetMap m;
  m.p_dim = p_dim;
  m.y_dim = y_dim;
  m.label = "singleton";
  m.eval = [f = std::move(f), y_dim](const Vector& p) { return SetUnion{y_dim, {ConvexBody::singleton(f(p))}}; };
  return m;
}

// ---------------------------------------------------------------------------
// estimators

std::string_view to_string(ModulusKind k) {
  switch (k) {
    case ModulusKind::liplsc: return "liplsc";
    case ModulusKind::calm: return "calm";
    case ModulusKind::lipusc: return "lipusc";
    case ModulusKind::liploc: return "liploc";
    case ModulusKind::ucalm: return "ucalm";
    case ModulusKind::lcalm: return "lcalm";
    case ModulusKind::calm_scalar: return "calm_scalar";
  }
  return "liplsc";
}

ModulusOptions ModulusOptions::from(const Settings& s) {
  ModulusOptions o;
  o.deltas = s.sched.deltas;
  o.dirs_n = s.sched.dirs_n;
  o.grid_n = s.sched.grid_n;
  o.tol = s.tol;
  return o;
}

ModulusEstimate liplsc_modulus(const ParamSetMap& Phi, const Vector& pbar, const Vector& xbar,
                               const ModulusOptions& opt) {
  if (Phi(pbar).dist(xbar) > opt.tol.membership) throw InputError("liplsc: xbar is not in Phi(pbar)");
  ModulusEstimate out{ModulusKind::liplsc, {}, 0.0};
  for (double d : opt.deltas) {
    double sup = 0.0;
    for (const auto& p : sphere(pbar, d, opt.dirs_n)) sup = std::max(sup, ratio(Phi(p).dist(xbar), d));
    out.est.levels.push_back({d, sup});
  }
  out.est = finish(std::move(out.est), opt.tol);
  return out;
}

ModulusEstimate calm_modulus(const ParamSetMap& Phi, const Vector& pbar, const Vector& xbar, double zeta,
                             const ModulusOptions& opt) {
  const SetUnion base = Phi(pbar);
  if (base.dist(xbar) > opt.tol.membership) throw InputError("calm: xbar is not in Phi(pbar)");
  if (!(zeta > 0.0)) throw InputError("calm: zeta must be positive");
  ModulusEstimate out{ModulusKind::calm, {}, zeta};
  for (double d : opt.deltas) {
    double sup = 0.0;
    for (const auto& p : sphere(pbar, d, opt.dirs_n)) {
      for (const auto& w : Phi(p).sample_in_ball(xbar, zeta, opt.grid_n)) sup = std::max(sup, ratio(base.dist(w), d));
    }
    out.est.levels.push_back({d, sup});
  }
  out.est = finish(std::move(out.est), opt.tol);
  return out;
}

ModulusEstimate lipusc_modulus(const ParamSetMap& Phi, const Vector& pbar, const ModulusOptions& opt) {
  const SetUnion base = Phi(pbar);
  if (base.empty()) throw InputError("lipusc: Phi(pbar) is empty");
  ModulusEstimate out{ModulusKind::lipusc, {}, 0.0};
  for (double d : opt.deltas) {
    double sup = 0.0;
    for (const auto& p : sphere(pbar, d, opt.dirs_n)) sup = std::max(sup, ratio(excess(Phi(p), base), d));
    out.est.levels.push_back({d, sup});
  }
  out.est = finish(std::move(out.est), opt.tol);
  return out;
}

ModulusEstimate liploc_modulus(const ParamSetMap& Phi, const Vector& pbar, const ModulusOptions& opt) {
  if (Phi(pbar).empty()) throw InputError("liploc: Phi(pbar) is empty");
  ModulusEstimate out{ModulusKind::liploc, {}, 0.0};
  const int per_axis = pbar.size() == 1 ? 9 : 5;
  for (double d : opt.deltas) {
    const auto pts = pair_lattice(pbar, d, per_axis);
    std::vector<SetUnion> vals;
    vals.reserve(pts.size());
    for (const auto& p : pts) vals.push_back(Phi(p));
    double sup = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        sup = std::max(sup, ratio(hausdorff(vals[i], vals[j]), (pts[i] - pts[j]).norm()));
      }
    }
    out.est.levels.push_back({d, sup});
  }
  out.est = finish(std::move(out.est), opt.tol);
  return out;
}

ScalarCalmModuli scalar_calm_moduli(const std::function<double(const Vector&)>& psi, const Vector& pbar,
                                    const ModulusOptions& opt) {
  const double f0 = psi(pbar);
  if (!std::isfinite(f0)) throw InputError("scalar calmness needs psi(pbar) finite");
  ScalarCalmModuli out{{ModulusKind::ucalm, {}, 0.0}, {ModulusKind::lcalm, {}, 0.0}, {ModulusKind::calm_scalar, {}, 0.0}};
  for (double d : opt.deltas) {
    double up = 0.0;
    double down = 0.0;
    for (const auto& p : sphere(pbar, d, opt.dirs_n)) {
      const double f = psi(p);
      if (std::isnan(f)) {
        up = down = kInf;
        continue;
      }
      up = std::max(up, std::max(0.0, f - f0) / d);
      down = std::max(down, std::max(0.0, f0 - f) / d);
    }
    out.upper.est.levels.push_back({d, up});
    out.lower.est.levels.push_back({d, down});
    out.both.est.levels.push_back({d, std::max(up, down)});
  }
  out.upper.est = finish(std::move(out.upper.est), opt.tol);
  out.lower.est = finish(std::move(out.lower.est), opt.tol);
  out.both.est = finish(std::move(out.both.est), opt.tol);
  return out;
}

Estimate joint_lipschitz(const InclusionInstance& inst, const ModulusOptions& opt) {
  const int np = inst.p_dim();
  const int nx = inst.x_dim();
  const int per_axis = np + nx <= 2 ? 5 : 3;
  Vector center(np + nx);
  center << inst.pbar(), inst.xbar();
  Estimate est;
  for (double d : opt.deltas) {
    const auto pts = box_grid(Box::around(center, d), per_axis);
    std::vector<MapValue> vals;
    vals.reserve(pts.size());
    for (const auto& z : pts) vals.push_back(value_of(inst.map(), z.head(np), z.tail(nx)));
    double sup = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const Vector dz = pts[i] - pts[j];
        const double dist = std::max(dz.head(np).norm(), dz.tail(nx).norm());
        sup = std::max(sup, ratio(value_hausdorff(vals[i], vals[j]), dist));
      }
    }
    est.levels.push_back({d, sup});
  }
  est.flags.push_back("max_metric");
  return finish(std::move(est), opt.tol);
}

Estimate parametric_lipschitz(const InclusionInstance& inst, const ModulusOptions& opt) {
  const auto xs = box_grid(inst.x_window(), grid_per_axis(inst.x_dim(), 21));
  Estimate est;
  for (double d : opt.deltas) {
    const auto ps = pair_lattice(inst.pbar(), d, 5);
    double sup = 0.0;
    for (const auto& x : xs) {
      std::vector<MapValue> vals;
      vals.reserve(ps.size());
      for (const auto& p : ps) vals.push_back(value_of(inst.map(), p, x));
      for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
          sup = std::max(sup, ratio(value_hausdorff(vals[i], vals[j]), (ps[i] - ps[j]).norm()));
        }
      }
    }
    est.levels.push_back({d, sup});
  }
  est.flags.push_back("region_restricted");
  return finish(std::move(est), opt.tol);
}

}  // namespace svi
