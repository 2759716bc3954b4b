#pragma once

#include "svi/core.hpp"
#include "svi/expression.hpp"
#include "svi/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace svi {

using ScalarField = std::function<double(const Vector& p, const Vector& x)>;

enum class Variable { p, x };

/// How a structural property of a map is known.
enum class TraitStatus { holds, assumed, fails };
std::string_view to_string(TraitStatus s);

/// F(p,x) = [f(p,x), +inf).
struct EpigraphMap {
  ScalarField f;
  std::optional<Expression> expr;
};

/// F(p,x) = {L x + B p : L in conv(matrices)}; B is optional.
struct FanMap {
  std::vector<Matrix> matrices;
  std::optional<Matrix> p_matrix;
};

struct ConstantMap {
  std::shared_ptr<const ConvexBody> set;
};

/// [-sqrt|t|, sqrt|t|] where t is the first component of the selected variable.
struct SqrtIntervalMap {
  Variable var = Variable::x;
};

/// (-inf,0] for t<0, R for t=0, [0,+inf) for t>0.
struct HalflineSignMap {
  Variable var = Variable::x;
};

struct CustomMap {
  std::function<ConvexBody(const Vector& p, const Vector& x)> eval;
  int y_dim = 1;
};

struct MapTraits {
  std::optional<double> lipschitz_p_hint;
  bool concave_in_x = false;
};

class SetMap {
 public:
  using Repr = std::variant<EpigraphMap, FanMap, ConstantMap, SqrtIntervalMap, HalflineSignMap, CustomMap>;

  static SetMap epigraph(Expression f);
  static SetMap epigraph(ScalarField f);
  static SetMap fan(std::vector<Matrix> matrices, std::optional<Matrix> p_matrix = std::nullopt);
  static SetMap constant(const ConvexBody& S);
  static SetMap sqrt_interval(Variable v = Variable::x);
  static SetMap halfline_sign(Variable v = Variable::x);
  static SetMap custom(std::function<ConvexBody(const Vector&, const Vector&)> eval, int y_dim);

  /// Throws InstanceError when the evaluator produces non-finite data.
  ConvexBody evaluate(const Vector& p, const Vector& x) const;
  /// Allocation-free value for maps whose values are 1-D intervals.
  std::optional<Interval> evaluate_interval(const Vector& p, const Vector& x) const;

  int y_dim() const;
  std::string_view kind() const;
  const Repr& repr() const { return repr_; }

  /// Lower semicontinuity of x -> F(p,x) for every p.
  TraitStatus lsc_in_x() const;
  /// Whether F(p,x) does not depend on p (structurally).
  bool p_independent() const;
  /// Fan without a p term, hence positively homogeneous in x.
  bool positively_homogeneous_in_x() const;

  MapTraits traits;

 private:
  explicit SetMap(Repr r) : repr_(std::move(r)) {}
  Repr repr_;
};

/// Union of disjoint closed intervals; the solution set of a 1-D slice.
struct SlicePiece {
  double lo;
  double hi;
  bool lo_clipped = false;  // touches the window edge; the set may continue past it
  bool hi_clipped = false;
};

struct SolutionSlice {
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<SlicePiece> pieces;

  bool empty() const { return pieces.empty(); }
  bool contains(double x, double tol = 0.0) const;
  /// Distance to the union, with clipped edges read as extending to infinity.
  double distance(double x) const;
  /// Pieces as intervals, clipped edges widened to +-inf.
  std::vector<Interval> extended() const;
};

/// The inclusion F(p,x) within C with reference point (pbar, xbar) in Solv(pbar).
class InclusionInstance {
 public:
  InclusionInstance(std::string id, SetMap F, ConeSpec C, Vector pbar, Vector xbar, Box p_window, Box x_window,
                    Settings settings = {});

  const std::string& id() const { return id_; }
  const SetMap& map() const { return F_; }
  const ConeSpec& cone() const { return C_; }
  int p_dim() const { return static_cast<int>(pbar_.size()); }
  int x_dim() const { return static_cast<int>(xbar_.size()); }
  int y_dim() const { return C_.dim(); }
  const Vector& pbar() const { return pbar_; }
  const Vector& xbar() const { return xbar_; }
  const Box& p_window() const { return p_window_; }
  const Box& x_window() const { return x_window_; }
  const Settings& settings() const { return settings_; }

  ConvexBody evaluate(const Vector& p, const Vector& x) const { return F_.evaluate(p, x); }
  double phi(const Vector& p, const Vector& x) const;
  bool in_solution(const Vector& p, const Vector& x) const;

 private:
  void validate();
  void check_concavity();

  std::string id_;
  SetMap F_;
  ConeSpec C_;
  Vector pbar_;
  Vector xbar_;
  Box p_window_;
  Box x_window_;
  Settings settings_;
};

/// phi_F(p,x) = e(F(p,x), C).
double phi(const SetMap& F, const ConeSpec& C, const Vector& p, const Vector& x);

bool in_solution(const SetMap& F, const ConeSpec& C, const Vector& p, const Vector& x, const Tolerances& tol = {});

/// Solv(p) intersected with the window [lo,hi] for x_dim = 1: sign changes of
/// phi on a grid of grid_n points, endpoints bisected to tol.root.
SolutionSlice solve_slice_1d(const SetMap& F, const ConeSpec& C, const Vector& p, double lo, double hi, int grid_n,
                             const Tolerances& tol = {});
SolutionSlice solve_slice_1d(const InclusionInstance& inst, const Vector& p);

}  // namespace svi
