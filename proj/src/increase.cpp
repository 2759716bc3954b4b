#include "svi/increase.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace svi {

double cov_matrix(const Matrix& L) {
  if (L.rows() == 0 || L.cols() == 0) return 0.0;
  if (L.rows() > L.cols()) return 0.0;
  if (L.rows() == L.cols()) {
    bool diagonal = true;
    for (Eigen::Index i = 0; i < L.rows() && diagonal; ++i) {
      for (Eigen::Index j = 0; j < L.cols(); ++j) {
        if (i != j && L(i, j) != 0.0) {
          diagonal = false;
          break;
        }
      }
    }
    if (diagonal) return L.diagonal().cwiseAbs().minCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(L);
  return svd.singularValues().minCoeff();
}

std::string_view to_string(IncreaseVariant v) {
  switch (v) {
    case IncreaseVariant::global: return "global";
    case IncreaseVariant::local: return "local";
    case IncreaseVariant::uniform: return "uniform";
  }
  return "?";
}

SumFacets sum_facets(const ConvexBody& S, const ConeSpec& C) {
  if (S.dim() != C.dim()) throw InputError("set and cone dimensions differ");
  if (S.is_enlargement()) throw InputError("C-increase checks need polyhedral values");
  SumFacets out;
  const int m = S.dim();
  if (m == 1) {
    const Interval s = *S.hull1d();
    const Interval c = *C.body().hull1d();
    out.hull1d = Interval{s.lo + c.lo, s.hi + c.hi};
    return out;
  }
  const auto& v = S.vrep();
  std::vector<Vector> gens;
  auto lift = [&](const Vector& y, double t) {
    Vector g(m + 1);
    g.head(m) = y;
    g[m] = t;
    gens.push_back(g);
  };
  for (const auto& p : v.points) lift(p, 1.0);
  for (const auto& r : v.rays) lift(r, 0.0);
  for (const auto& g : C.generators()) lift(g, 0.0);
  for (const auto& a : detail::cone_normals(gens, m + 1)) {
    const Vector n = a.head(m);
    const double len = n.norm();
    if (len < 1e-12) continue;  // the t >= 0 facet
    out.normals.push_back(n / len);
    out.offsets.push_back(-a[m] / len);
  }
  return out;
}

bool increase_inclusion(const ConvexBody& phi_u, const SumFacets& K, double alpha, double r, double tol) {
  const double depth = (alpha - 1.0) * r;
  if (K.hull1d) {
    const Interval a = *phi_u.hull1d();
    const Interval k = *K.hull1d;
    const bool lo_ok = !std::isfinite(k.lo) || (std::isfinite(a.lo) && a.lo - k.lo >= depth - tol * (1.0 + std::abs(a.lo)));
    const bool hi_ok = !std::isfinite(k.hi) || (std::isfinite(a.hi) && k.hi - a.hi >= depth - tol * (1.0 + std::abs(a.hi)));
    return lo_ok && hi_ok;
  }
  const auto& v = phi_u.vrep();
  for (std::size_t i = 0; i < K.normals.size(); ++i) {
    const Vector& n = K.normals[i];
    for (const auto& ray : v.rays) {
      if (n.dot(ray) > tol * ray.norm()) return false;
    }
    for (const auto& pt : v.points) {
      const double slack = K.offsets[i] - n.dot(pt);
      if (slack < depth - tol * (1.0 + std::abs(K.offsets[i]))) return false;
    }
  }
  return true;
}

namespace {

std::vector<Vector> search_dirs(int dim, int n) {
  if (dim == 1) return {make_vector({1.0}), make_vector({-1.0})};
  return unit_directions(dim, n);
}

int odd_at_least3(int n) {
  n = std::max(n, 3);
  return n % 2 == 1 ? n : n + 1;
}

}  // namespace

IncreaseCertificate check_c_increase(const MapFn& F, const ConeSpec& C, double alpha,
                                     const std::vector<std::pair<Vector, Vector>>& samples,
                                     const IncreaseOptions& opt) {
  if (!(alpha > 1.0)) throw InputError("C-increase needs alpha > 1");
  IncreaseCertificate cert;
  cert.alpha = alpha;
  if (samples.empty()) return cert;
  const int xd = static_cast<int>(samples.front().second.size());
  const auto dirs = search_dirs(xd, opt.search_dirs);
  constexpr double kFractions[] = {1.0, 0.75, 0.5};

  for (const auto& [p, x] : samples) {
    const SumFacets K = sum_facets(F(p, x), C);
    for (double r : opt.radii) {
      ++cert.checked_n;
      std::vector<Vector> cands;
      if (opt.witness_dir && opt.witness_dir->size() == x.size()) {
        cands.push_back(x + r * opt.witness_dir->normalized());
      }
      cands.push_back(x);
      for (double f : kFractions) {
        for (const auto& d : dirs) cands.push_back(x + (f * r) * d);
      }
      bool found = false;
      for (const auto& u : cands) {
        if (increase_inclusion(F(p, u), K, alpha, r, opt.tol)) {
          cert.witnesses.push_back({p, x, r, u});
          found = true;
          break;
        }
      }
      if (!found) cert.failures.push_back({p, x, r, "no witness among sampled u"});
    }
  }
  return cert;
}

IncreaseCertificate check_c_increase_global(const std::function<ConvexBody(const Vector&)>& slice, const ConeSpec& C,
                                            double alpha, const Box& window, const IncreaseOptions& opt) {
  if (!window.lo.allFinite() || !window.hi.allFinite()) throw InputError("global C-increase needs a bounded window");
  std::vector<std::pair<Vector, Vector>> samples;
  const Vector none = Vector::Zero(0);
  for (const auto& x : box_grid(window, odd_at_least3(opt.grid_n))) samples.emplace_back(none, x);
  MapFn F = [&slice](const Vector&, const Vector& x) { return slice(x); };
  auto cert = check_c_increase(F, C, alpha, samples, opt);
  cert.variant = IncreaseVariant::global;
  return cert;
}

IncreaseCertificate check_c_increase_local(const std::function<ConvexBody(const Vector&)>& slice, const ConeSpec& C,
                                           double alpha, const Vector& xbar, double delta,
                                           const IncreaseOptions& opt) {
  if (!(delta > 0.0)) throw InputError("local C-increase needs delta > 0");
  IncreaseOptions o = opt;
  o.radii.clear();
  for (double r : opt.radii) {
    if (r < delta) o.radii.push_back(r);
  }
  std::vector<std::pair<Vector, Vector>> samples;
  const Vector none = Vector::Zero(0);
  for (const auto& x : ball_grid(xbar, delta, odd_at_least3(opt.grid_n))) samples.emplace_back(none, x);
  MapFn F = [&slice](const Vector&, const Vector& x) { return slice(x); };
  auto cert = o.radii.empty() ? IncreaseCertificate{} : check_c_increase(F, C, alpha, samples, o);
  cert.alpha = alpha;
  cert.variant = IncreaseVariant::local;
  cert.delta = delta;
  return cert;
}

IncreaseCertificate check_c_increase_uniform(const InclusionInstance& inst, double alpha, double delta,
                                             const IncreaseOptions& opt) {
  if (!(delta > 0.0)) throw InputError("uniform C-increase needs delta > 0");
  IncreaseOptions o = opt;
  o.radii.clear();
  for (double r : opt.radii) {
    if (r < delta) o.radii.push_back(r);
  }
  // keep the joint lattice affordable above one dimension
  const int gp = odd_at_least3(inst.p_dim() == 1 ? std::min(opt.grid_n, 5) : 3);
  const int gx = odd_at_least3(inst.x_dim() == 1 ? opt.grid_n : std::min(opt.grid_n, 5));
  std::vector<std::pair<Vector, Vector>> samples;
  const auto xs = ball_grid(inst.xbar(), delta, gx);
  for (const auto& p : ball_grid(inst.pbar(), delta, gp)) {
    for (const auto& x : xs) samples.emplace_back(p, x);
  }
  MapFn F = [&inst](const Vector& p, const Vector& x) { return inst.evaluate(p, x); };
  auto cert = o.radii.empty() ? IncreaseCertificate{} : check_c_increase(F, inst.cone(), alpha, samples, o);
  cert.alpha = alpha;
  cert.variant = IncreaseVariant::uniform;
  cert.delta = delta;
  return cert;
}

double largest_certified_alpha(const std::function<bool(double)>& check, double cap, int iters) {
  double lo = 1.0 + 1e-6;
  if (!check(lo)) return 1.0;
  double hi = cap;
  if (check(hi)) return hi;
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (check(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

InteriorityResult interiority_check(const std::vector<Matrix>& G, const ConeSpec& C, int search_budget) {
  if (G.empty()) throw InputError("fan needs at least one matrix");
  const int n = static_cast<int>(G.front().cols());
  const int m = C.dim();
  std::vector<Vector> g_unit;
  for (const auto& L : G) {
    if (L.rows() != m || L.cols() != n) throw InputError("fan matrices must share one shape matching the cone");
    for (const auto& a : C.normals()) {
      const Vector g = L.transpose() * a;
      const double len = g.norm();
      if (len > 1e-14) g_unit.push_back(g / len);
    }
  }
  InteriorityResult res;
  auto margin = [&](const Vector& u) {
    double e = kInf;
    for (const auto& g : g_unit) e = std::min(e, -g.dot(u));
    return e;
  };
  if (n == 1) {
    for (double s : {1.0, -1.0}) {
      const Vector u = make_vector({s});
      const double e = margin(u);
      if (res.witness.size() == 0 || e > res.margin) {
        res.witness = u;
        res.margin = e;
      }
    }
  } else {
    if (search_budget <= 0) search_budget = n == 2 ? 256 : (n == 3 ? 1024 : 2048);
    double best = -kInf;
    Vector bu;
    for (const auto& u : unit_directions(n, search_budget)) {
      const double e = margin(u);
      if (e > best) {
        best = e;
        bu = u;
      }
    }
    double step = 0.1;
    while (step > 1e-10) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        for (double s : {step, -step}) {
          Vector u = bu;
          u[i] += s;
          u.normalize();
          const double e = margin(u);
          if (e > best) {
            best = e;
            bu = u;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    res.witness = bu;
    res.margin = best;
  }
  res.margin = std::min(res.margin, 1.0);
  res.ok = res.margin > 1e-9;
  return res;
}

FanBound fan_increase_bound(const std::vector<Matrix>& G, const ConeSpec& C, int sample_n, std::uint64_t seed) {
  FanBound fb;
  auto reject = [&](std::string why) {
    fb.applicable = false;
    fb.reason = std::move(why);
    return fb;
  };
  if (G.empty()) return reject("fan has no matrices");
  if (C.is_zero()) return reject("cone is {0}");
  if (C.is_whole_space()) return reject("cone is the whole space");
  if (!C.pointed()) return reject("cone is not pointed");
  if (!C.has_interior()) return reject("cone has empty interior");
  fb.interiority = interiority_check(G, C);
  if (!fb.interiority.ok) return reject("no direction maps every fan matrix into int C");

  double eta = kInf;
  for (const auto& L : G) eta = std::min(eta, cov_matrix(L));
  fb.samples = static_cast<int>(G.size());
  if (G.size() > 1) {
    Rng rng(seed);
    for (int s = 0; s < sample_n; ++s) {
      std::vector<double> w(G.size());
      double total = 0.0;
      for (double& wi : w) {
        wi = -std::log(std::max(rng.uniform(), 1e-300));
        total += wi;
      }
      Matrix L = Matrix::Zero(G.front().rows(), G.front().cols());
      for (std::size_t i = 0; i < G.size(); ++i) L += (w[i] / total) * G[i];
      eta = std::min(eta, cov_matrix(L));
    }
    fb.samples += sample_n;
    fb.flags.push_back("sampled_upper_bound_on_eta");
  }
  fb.eta_bar = eta;
  if (!(eta > 0.0)) return reject("cov vanishes on conv(G)");
  fb.applicable = true;
  fb.value = eta + 1.0;
  fb.rho = fb.interiority.margin;
  fb.constructive_bound = 1.0 + fb.rho * eta;
  return fb;
}

}  // namespace svi
