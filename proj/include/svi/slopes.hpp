#pragma once

#include "svi/core.hpp"
#include "svi/estimate.hpp"
#include "svi/setmaps.hpp"

#include <functional>
#include <vector>

namespace svi {

/// psi : R^n -> R u {+inf} with optional first-order oracles.
struct ScalarFn {
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> gradient;
  /// dist(0, subdifferential of psi at x), for convex psi.
  std::function<double(const Vector&)> subdiff_dist;

  double operator()(const Vector& x) const { return eval(x); }
};

/// x -> phi_F(p, x) with p frozen.
ScalarFn phi_in_x(const InclusionInstance& inst, const Vector& p);

/// Per radius r: sup over u on spheres of radius r*{0.25,0.5,1} of
/// (psi(x)-psi(u))/|u-x|, clamped at 0. A point whose sampled ratios are all
/// below tol.slope at the two smallest radii is reported as a local minimizer
/// with value 0.
Estimate strong_slope(const ScalarFn& psi, const Vector& x, const std::vector<double>& radii, int dirs_n,
                      const Tolerances& tol = {});

double exact_slope_convex(const ScalarFn& psi, const Vector& x);

/// Per eps: inf of strong slopes over grid points of ball(xbar, eps) with
/// psi(xbar) < psi(x) < psi(xbar)+eps. Inner slope radii are the radius
/// schedule scaled by eps. An empty band gives +inf with flag "empty_band".
Estimate strict_outer_slope(const ScalarFn& psi, const Vector& xbar, const std::vector<double>& eps_schedule,
                            int grid_n, const Settings& s = {});

/// As strict_outer_slope, over (p,x) in ball(pbar,eps) x ball(xbar,eps) with
/// 0 < phi_F(p,x) < eps; the slope is taken in x with p frozen.
Estimate partial_strict_outer_slope(const InclusionInstance& inst, const std::vector<double>& eps_schedule,
                                    int grid_n);
Estimate partial_strict_outer_slope(const InclusionInstance& inst);

/// Region-restricted inf of strong slopes of phi_F(pbar, .) over infeasible
/// points of `region`. Levels hold the inf over points per radius; each
/// point's radii are shrunk to stay below its distance to Solv(pbar).
Estimate tau(const InclusionInstance& inst, const Box& region, int grid_n);

/// Lattice points per axis used for a ball of the given dimension, capped so
/// that nested slope sampling stays affordable above one dimension.
int grid_per_axis(int dim, int grid_n);

}  // namespace svi
