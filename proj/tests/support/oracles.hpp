#pragma once

// Reference computations used by the tests. None of them call into the
// library's geometry or estimation code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// splitmix64; independent of the library's generator.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t s_;
};

inline Vec random_point(Rand& r, int m, double lo, double hi) {
  Vec v(m);
  for (int i = 0; i < m; ++i) v[i] = r.uniform(lo, hi);
  return v;
}

inline std::vector<Vec> random_polytope(Rand& r, int m, int n, double lo, double hi) {
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i) out.push_back(random_point(r, m, lo, hi));
  return out;
}

/// Distance from x to conv(verts) by brute force over all vertex subsets:
/// each subset's affine least-squares point with nonnegative weights is a
/// point of the hull, and the nearest point is one of them.
inline double dist_hull(const Vec& x, const std::vector<Vec>& verts) {
  const int n = static_cast<int>(verts.size());
  double best = inf;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    const int k = static_cast<int>(idx.size());
    // minimize |V w - x|^2 subject to sum w = 1 via the KKT system
    const int m = static_cast<int>(x.size());
    Mat V(m, k);
    for (int j = 0; j < k; ++j) V.col(j) = verts[idx[j]];
    Mat K = Mat::Zero(k + 1, k + 1);
    K.topLeftCorner(k, k) = V.transpose() * V;
    K.block(0, k, k, 1).setOnes();
    K.block(k, 0, 1, k).setOnes();
    Vec rhs(k + 1);
    rhs.head(k) = V.transpose() * x;
    rhs[k] = 1.0;
    const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);
    const Vec w = sol.head(k);
    if (std::abs(w.sum() - 1.0) > 1e-9 || w.minCoeff() < -1e-12) continue;
    best = std::min(best, (V * w - x).norm());
  }
  return best;
}

/// sup over A of dist(., conv(B)), with A = conv(a) sampled at its vertices
/// and at `n` random convex combinations.
inline double excess_dense(const std::vector<Vec>& a, const std::vector<Vec>& b, Rand& r, int n) {
  double e = 0.0;
  for (const auto& v : a) e = std::max(e, dist_hull(v, b));
  for (int s = 0; s < n; ++s) {
    std::vector<double> w(a.size());
    double t = 0.0;
    for (double& wi : w) t += (wi = -std::log(1.0 - r.uniform()));
    Vec y = Vec::Zero(a.front().size());
    for (std::size_t i = 0; i < a.size(); ++i) y += (w[i] / t) * a[i];
    e = std::max(e, dist_hull(y, b));
  }
  return e;
}

/// Distance to the nonnegative orthant.
inline double dist_orthant(const Vec& y) { return y.cwiseMin(0.0).norm(); }

/// e(conv(s), orthant): the distance is convex, so the vertex maximum.
inline double excess_orthant(const std::vector<Vec>& s) {
  double e = 0.0;
  for (const auto& v : s) e = std::max(e, dist_orthant(v));
  return e;
}

/// Smallest singular value of a square diagonal matrix.
inline double sigma_min_diagonal(const Vec& d) { return d.cwiseAbs().minCoeff(); }

/// One-dimensional fan x -> {l x + c p : l in [a,b]} against C = [0,inf):
/// phi = max(0, -(min(a x, b x) + c p)).
inline double phi_fan1d(double a, double b, double c, double p, double x) {
  return std::max(0.0, -(std::min(a * x, b * x) + c * p));
}

/// Strong slope of a convex piecewise-linear function max_i (k_i x + d_i)
/// at x: dist(0, conv of the active slopes).
inline double slope_pwl(const std::vector<double>& k, const std::vector<double>& d, double x) {
  double top = -inf;
  for (std::size_t i = 0; i < k.size(); ++i) top = std::max(top, k[i] * x + d[i]);
  double lo = inf, hi = -inf;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] * x + d[i] >= top - 1e-12 * (1.0 + std::abs(top))) {
      lo = std::min(lo, k[i]);
      hi = std::max(hi, k[i]);
    }
  }
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return std::min(std::abs(lo), std::abs(hi));
}

/// Slope of phi_fan1d(.,p) at an infeasible x.
inline double slope_fan1d(double a, double b, double c, double p, double x) {
  return slope_pwl({-a, -b, 0.0}, {-c * p, -c * p, 0.0}, x);
}

/// F(x) = [x, inf) against C = [0, inf) is metrically C-increasing with
/// constant alpha at (x, r) iff some u in [x-r, x+r] has u - alpha r >= x - r.
/// The left side grows in u, so the right endpoint decides.
inline bool halfline_increase_holds(double x, double r, double alpha) {
  const double u = x + r;
  return u - alpha * r >= x - r - 1e-15 * (1.0 + std::abs(x));
}

}  // namespace oracle
