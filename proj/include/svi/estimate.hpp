#pragma once

#include "svi/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace svi {

enum class Convergence { converged, diverging, inconclusive };

std::string_view to_string(Convergence c);

/// One refinement level: the scale (radius, epsilon or delta) and the estimate there.
struct Level {
  double scale;
  double value;
};

/// A sampled limit estimate. Levels are ordered by decreasing scale and
/// `value` is the estimate at the smallest scale.
struct Estimate {
  double value = kInf;
  std::vector<Level> levels;
  Convergence verdict = Convergence::inconclusive;
  std::vector<std::string> flags;

  bool finite() const;
  bool has_flag(std::string_view f) const;
};

/// Stabilization rule: the last `window` levels agree within the relative
/// tolerance (plus an absolute floor). Divergence: the final level is +inf,
/// or the tail strictly increases across at least three levels with total
/// growth of at least `diverge_factor`.
Convergence classify_levels(const std::vector<Level>& levels, int window, const Tolerances& tol);

/// Fills value/verdict from `levels`.
void finalize(Estimate& est, int window, const Tolerances& tol);

}  // namespace svi
