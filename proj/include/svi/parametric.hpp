#pragma once

#include "svi/core.hpp"
#include "svi/estimate.hpp"
#include "svi/expression.hpp"
#include "svi/moduli.hpp"
#include "svi/setmaps.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svi {

/// theta : P x X -> R, finite on the windows.
struct Objective {
  std::function<double(const Vector& p, const Vector& x)> eval;
  std::optional<Expression> expr;
  /// Global Lipschitz constant on P x X under the max distance.
  std::optional<double> lip_hint;

  static Objective from_expression(Expression e, std::optional<double> lip_hint = std::nullopt);
  double operator()(const Vector& p, const Vector& x) const { return eval(p, x); }
};

enum class ValueStatus { attained, unbounded_below, infeasible };
std::string_view to_string(ValueStatus s);

struct ValueResult {
  double val = kInf;
  std::vector<Vector> argmin;
  ValueStatus status = ValueStatus::infeasible;
  std::vector<std::string> flags;
};

/// val(p) = inf of theta(p,.) over Solv(p) within the x-window (x_dim = 1).
/// Each slice piece is scanned on a 64-point grid and the best bracket is
/// refined by golden-section search. A piece clipped by the window whose
/// minimum sits on the clipped edge is probed past the window; a feasible,
/// strictly decreasing continuation reports -inf (heuristic, flagged).
ValueResult value_at(const InclusionInstance& inst, const Objective& theta, const Vector& p);

struct ValueSample {
  Vector p;
  ValueResult result;
};
std::vector<ValueSample> value_profile(const InclusionInstance& inst, const Objective& theta,
                                       const std::vector<Vector>& ps);

/// One assembled upper bound on the calmness of val.
struct ValBound {
  std::string id;
  std::optional<double> value;  // empty when not evaluable
  std::string note;
};

struct ValCalmnessReport {
  ValueResult at_pbar;
  ScalarCalmModuli empirical;
  Estimate theta_ucalm;  // calmness from above of theta at (pbar,xbar), max distance
  Estimate theta_lip;    // Lipschitz constant of theta on the windows
  bool theta_lip_from_hint = false;
  Estimate lipusc_F;     // Lipusc of F(., xbar) at pbar
  Estimate sostslx;
  Estimate lip_p;
  bool lip_p_from_hint = false;
  Estimate tau;
  Box tau_region;
  ValBound ucalm_bound;  // ucalm(theta) * max{1, Lipusc F / sostslx}
  ValBound lcalm_bound;  // lip theta * max{1, lip_p F / tau}
  ValBound calm_bound;   // lip theta * max{1, lip_p F / min(sostslx, tau)}
};

/// Needs xbar in Argmin(pbar); throws InputError otherwise.
ValCalmnessReport val_calmness_report(const InclusionInstance& inst, const Objective& theta,
                                      const std::optional<Box>& tau_region = std::nullopt);

/// Sup of [theta - theta(pbar,xbar)]_+ / delta over the max-metric sphere of radius delta.
Estimate objective_upper_calmness(const Objective& theta, const Vector& pbar, const Vector& xbar,
                                  const ModulusOptions& opt);

/// Seeded difference quotients of theta at several pair scales. The value is
/// the largest quotient seen.
Estimate objective_lipschitz(const Objective& theta, const Box& p_window, const Box& x_window, std::uint64_t seed,
                             const Tolerances& tol);

/// c * max{1, num/den} with den read through the positivity threshold;
/// empty when an input is not usable.
std::optional<double> ratio_bound(double c, double num, double den, double positivity, std::string* why);

}  // namespace svi
