#pragma once

#include "svi/core.hpp"
#include "svi/estimate.hpp"
#include "svi/increase.hpp"
#include "svi/parametric.hpp"
#include "svi/setmaps.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svi {

/// verified: exact or structural; window_verified: sampled evidence only.
enum class HypStatus { verified, window_verified, assumed, failed, not_checkable };
std::string_view to_string(HypStatus s);

enum class Verdict { consistent, vacuous, violated, not_evaluable };
std::string_view to_string(Verdict v);

/// upper: empirical should not exceed the bound; lower: measured should not fall below it.
enum class BoundKind { upper, lower };
std::string_view to_string(BoundKind k);

struct HypothesisCheck {
  std::string id;
  std::string description;
  HypStatus status = HypStatus::not_checkable;
  std::string evidence;
};

struct NamedEstimate {
  std::string name;
  Estimate est;
};

struct CertificationReport {
  std::string instance_id;
  std::string theorem;
  std::vector<HypothesisCheck> hypotheses;
  std::optional<double> bound;
  BoundKind bound_kind = BoundKind::upper;
  std::string empirical_kind;
  Estimate empirical;
  std::optional<double> margin;
  Verdict verdict = Verdict::not_evaluable;
  std::uint64_t seed = 0;
  std::vector<NamedEstimate> components;
  std::vector<std::string> notes;

  /// Every hypothesis verified or window-verified.
  bool hypotheses_supported() const;
};

struct CertifyOptions {
  /// Replaces the computed bound (for testing the exit-code path).
  std::optional<double> bound_override;
  std::optional<Box> tau_region;
  std::optional<double> zeta;
  /// alpha for the increase claims; otherwise the fan constructive bound or bisection.
  std::optional<double> alpha;
  double increase_delta = 0.2;
};

/// Applies the verdict rules with relative slack: any failed hypothesis gives
/// vacuous, a missing bound gives not_evaluable, otherwise the empirical value
/// is compared with the bound in the direction of bound_kind.
void decide(CertificationReport& r, double slack);

CertificationReport certify_liplsc(const InclusionInstance& inst, const CertifyOptions& opt = {});
CertificationReport certify_calm(const InclusionInstance& inst, const CertifyOptions& opt = {});
CertificationReport certify_lipusc(const InclusionInstance& inst, const CertifyOptions& opt = {});
/// Calmness from above, from below and two-sided calmness of val.
std::vector<CertificationReport> certify_val(const InclusionInstance& inst, const Objective& theta,
                                             const CertifyOptions& opt = {});
/// Slope lower bounds from metric C-increase: the local slope claim at
/// infeasible points near xbar, then the uniform, local and global constants.
std::vector<CertificationReport> certify_increase_slope(const InclusionInstance& inst,
                                                        const CertifyOptions& opt = {});

/// Concavity of x -> F(p,x): structural for fans and constant maps, the
/// validated flag otherwise.
HypothesisCheck concavity_hypothesis(const InclusionInstance& inst, const std::string& id);

}  // namespace svi
