#pragma once

#include "svi/core.hpp"
#include "svi/estimate.hpp"
#include "svi/geometry.hpp"
#include "svi/setmaps.hpp"
#include "svi/slopes.hpp"

#include <functional>
#include <string>
#include <vector>

namespace svi {

/// A finite union of convex bodies; no parts means the empty set.
struct SetUnion {
  int dim = 1;
  std::vector<ConvexBody> parts;

  bool empty() const { return parts.empty(); }
  double dist(const Vector& x) const;
  /// Points of the union inside ball(center, radius): endpoints plus a
  /// uniform grid for intervals, vertices, edge midpoints, the barycenter
  /// and the projection of the center for higher-dimensional parts.
  std::vector<Vector> sample_in_ball(const Vector& center, double radius, int grid_n) const;
};

/// sup over A of dist(., B). Exact for 1-D unions; above one dimension exact
/// when B has a single part.
double excess(const SetUnion& A, const SetUnion& B);
double hausdorff(const SetUnion& A, const SetUnion& B);

/// A parameterized set p -> Phi(p).
struct ParamSetMap {
  std::function<SetUnion(const Vector&)> eval;
  int p_dim = 1;
  int y_dim = 1;
  std::string label;

  SetUnion operator()(const Vector& p) const { return eval(p); }

  /// p -> F(p, xbar)
  static ParamSetMap map_in_p(const SetMap& F, const Vector& xbar);
  /// x -> F(pbar, x)
  static ParamSetMap map_in_x(const SetMap& F, const Vector& pbar);
  /// p -> Solv(p), reconstructed by solve_slice_1d on the instance's x-window.
  static ParamSetMap solution_map(const InclusionInstance& inst);
  /// p -> {f(p)}
  static ParamSetMap singleton(std::function<Vector(const Vector&)> f, int p_dim, int y_dim);
};

enum class ModulusKind { liplsc, calm, lipusc, liploc, ucalm, lcalm, calm_scalar };
std::string_view to_string(ModulusKind k);

struct ModulusEstimate {
  ModulusKind kind = ModulusKind::liplsc;
  Estimate est;
  double zeta = 0.0;  // calm only

  double value() const { return est.value; }
  Convergence verdict() const { return est.verdict; }
};

struct ModulusOptions {
  std::vector<double> deltas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  int dirs_n = 64;
  int grid_n = 41;
  Tolerances tol;

  static ModulusOptions from(const Settings& s);
};

/// Per delta: sup over p on the sphere of radius delta of dist(xbar, Phi(p))/delta.
ModulusEstimate liplsc_modulus(const ParamSetMap& Phi, const Vector& pbar, const Vector& xbar,
                               const ModulusOptions& opt = {});

/// Per delta: sup over p and sampled w in Phi(p) within zeta of xbar of dist(w, Phi(pbar))/delta.
ModulusEstimate calm_modulus(const ParamSetMap& Phi, const Vector& pbar, const Vector& xbar, double zeta,
                             const ModulusOptions& opt = {});

/// Per delta: sup of e(Phi(p), Phi(pbar))/delta.
ModulusEstimate lipusc_modulus(const ParamSetMap& Phi, const Vector& pbar, const ModulusOptions& opt = {});

/// Per delta: sup over lattice pairs in ball(pbar, delta) of H(Phi(p1),Phi(p2))/|p1-p2|.
ModulusEstimate liploc_modulus(const ParamSetMap& Phi, const Vector& pbar, const ModulusOptions& opt = {});

struct ScalarCalmModuli {
  ModulusEstimate upper;  // calm from above
  ModulusEstimate lower;  // calm from below
  ModulusEstimate both;
};

ScalarCalmModuli scalar_calm_moduli(const std::function<double(const Vector&)>& psi, const Vector& pbar,
                                    const ModulusOptions& opt = {});

/// Two-point Hausdorff ratio of F over a max-metric box around (pbar, xbar).
Estimate joint_lipschitz(const InclusionInstance& inst, const ModulusOptions& opt = {});

/// sup over the x-window lattice of H(F(p1,x),F(p2,x))/|p1-p2| for p1,p2 near
/// pbar; flagged region_restricted.
Estimate parametric_lipschitz(const InclusionInstance& inst, const ModulusOptions& opt = {});

}  // namespace svi
