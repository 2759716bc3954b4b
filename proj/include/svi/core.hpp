#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Ambient dimensions above this are rejected at construction.
inline constexpr int kMaxDim = 4;

/// Malformed input: dimension mismatch, invalid representation, bad spec field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed object that fails a semantic check (reference point not a
/// solution, evaluator returned a non-finite value, ...).
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double membership = 1e-9;  // set membership and zero tests
  double root = 1e-8;        // endpoint location in solution slices
  double slice = 0.0;        // feasibility threshold used while bisecting slices
  double slope = 1e-7;       // local-minimizer detection in strong slopes
  double value = 1e-8;       // golden-section termination for val(p)
  double slack = 0.10;       // relative slack for bound-vs-empirical verdicts
  double positivity = 0.05;  // slopes below this count as zero in hypothesis checks
  double converge_rel = 0.05;
  double converge_abs = 1e-6;
  double diverge_factor = 10.0;
};

struct Schedules {
  std::vector<double> radii{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3};
  std::vector<double> deltas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  int dirs_n = 64;
  int grid_n = 41;
};

struct Settings {
  Tolerances tol;
  Schedules sched;
  std::uint64_t seed = 20240601;
};

/// Axis-aligned box; used for parameter and decision windows.
struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vector& v, double tol = 0.0) const;
  Vector center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo).maxCoeff(); }
  static Box around(const Vector& c, double radius);
  Box intersect(const Box& other) const;
};

/// Deterministic generator; doubles are built from raw 64-bit draws so the
/// stream does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

  std::uint64_t next();
  double uniform();  // [0,1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

Vector make_vector(std::initializer_list<double> values);
Vector make_vector(std::span<const double> values);
std::vector<double> to_std(const Vector& v);

/// Unit directions in R^dim. dim 1 gives exactly {-1,+1}; dim 2 uniform angles;
/// dim 3 a Fibonacci sphere; dim 4 seeded Gaussian draws.
std::vector<Vector> unit_directions(int dim, int n);

/// Lattice of points in the box with `per_axis` points per coordinate axis.
std::vector<Vector> box_grid(const Box& box, int per_axis);

/// Lattice points of the cube around `center` restricted to the Euclidean ball.
std::vector<Vector> ball_grid(const Vector& center, double radius, int per_axis);

}  // namespace svi
