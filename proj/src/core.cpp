#include "svi/core.hpp"
#include "svi/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace svi {

bool Box::contains(const Vector& v, double tol) const {
  if (v.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < lo[i] - tol || v[i] > hi[i] + tol) return false;
  }
  return true;
}

Box Box::around(const Vector& c, double radius) {
  return Box{c.array() - radius, c.array() + radius};
}

Box Box::intersect(const Box& other) const {
  return Box{lo.cwiseMax(other.lo), hi.cwiseMin(other.hi)};
}

// splitmix64
std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Vector make_vector(std::span<const double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<Vector> unit_directions(int dim, int n) {
  std::vector<Vector> dirs;
  if (dim <= 0) return dirs;
  if (dim == 1) return {make_vector({-1.0}), make_vector({1.0})};
  n = std::max(n, 4);
  dirs.reserve(static_cast<std::size_t>(n));
  if (dim == 2) {
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n;
      dirs.push_back(make_vector({std::cos(a), std::sin(a)}));
    }
  } else if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / n;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * k;
      dirs.push_back(make_vector({rad * std::cos(a), rad * std::sin(a), z}));
    }
  } else {
    Rng rng(0x5EEDULL + static_cast<std::uint64_t>(dim));
    for (int k = 0; k < n; ++k) {
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = rng.normal();
      dirs.push_back(v.normalized());
    }
  }
  // coordinate axes are always included
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  return dirs;
}

std::vector<Vector> box_grid(const Box& box, int per_axis) {
  const int d = box.dim();
  per_axis = std::max(per_axis, 1);
  std::vector<Vector> pts;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    Vector v(d);
    for (int i = 0; i < d; ++i) {
      const double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
      v[i] = box.lo[i] + t * (box.hi[i] - box.lo[i]);
    }
    pts.push_back(std::move(v));
    int k = 0;
    while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == d) break;
  }
  return pts;
}

std::vector<Vector> ball_grid(const Vector& center, double radius, int per_axis) {
  std::vector<Vector> out;
  for (auto& v : box_grid(Box::around(center, radius), per_axis)) {
    if ((v - center).norm() <= radius * (1.0 + 1e-12)) out.push_back(std::move(v));
  }
  return out;
}

std::string_view to_string(Convergence c) {
  switch (c) {
    case Convergence::converged: return "converged";
    case Convergence::diverging: return "diverging";
    case Convergence::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

bool Estimate::finite() const { return std::isfinite(value); }

bool Estimate::has_flag(std::string_view f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

Convergence classify_levels(const std::vector<Level>& levels, int window, const Tolerances& tol) {
  if (levels.empty()) return Convergence::inconclusive;
  const auto n = static_cast<int>(levels.size());
  if (!std::isfinite(levels.back().value)) {
    // +inf on every one of the last levels is structural divergence
    return Convergence::diverging;
  }
  // strictly increasing tail
  int run = 1;
  for (int i = n - 1; i > 0 && levels[i].value > levels[i - 1].value; --i) ++run;
  if (run >= 3) {
    const double first = levels[n - run].value;
    const double last = levels[n - 1].value;
    if (first > 0.0 && last >= tol.diverge_factor * first) return Convergence::diverging;
  }
  if (n < window) return Convergence::inconclusive;
  for (int i = n - window; i < n - 1; ++i) {
    const double a = levels[i].value;
    const double b = levels[n - 1].value;
    if (!std::isfinite(a)) return Convergence::inconclusive;
    if (std::abs(a - b) > tol.converge_rel * std::max(std::abs(a), std::abs(b)) + tol.converge_abs) {
      return Convergence::inconclusive;
    }
  }
  return Convergence::converged;
}

void finalize(Estimate& est, int window, const Tolerances& tol) {
  if (est.levels.empty()) {
    est.value = kInf;
    est.verdict = Convergence::inconclusive;
    return;
  }
  est.value = est.levels.back().value;
  est.verdict = classify_levels(est.levels, window, tol);
}

}  // namespace svi
