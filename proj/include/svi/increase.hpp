#pragma once

#include "svi/core.hpp"
#include "svi/geometry.hpp"
#include "svi/setmaps.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svi {

/// inf over unit y of |L^T y|: the smallest singular value when rows <= cols, else 0.
double cov_matrix(const Matrix& L);

enum class IncreaseVariant { global, local, uniform };
std::string_view to_string(IncreaseVariant v);

struct IncreaseWitness {
  Vector p;
  Vector x;
  double r = 0.0;
  Vector u;
};

struct IncreaseFailure {
  Vector p;
  Vector x;
  double r = 0.0;
  std::string reason;
};

struct IncreaseCertificate {
  IncreaseVariant variant = IncreaseVariant::global;
  double alpha = 0.0;
  double delta = 0.0;  // local and uniform variants
  std::vector<IncreaseWitness> witnesses;
  int checked_n = 0;
  std::vector<IncreaseFailure> failures;

  bool valid() const { return checked_n > 0 && failures.empty(); }
};

struct IncreaseOptions {
  std::vector<double> radii{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  int search_dirs = 64;  // u-search directions per radius fraction
  int grid_n = 9;        // sample points per axis for x (and p)
  /// Unit direction of the constructive witness u = x + r*w, tried first.
  std::optional<Vector> witness_dir;
  /// Absolute rounding allowance, scaled by 1+|coordinate|.
  double tol = 1e-12;
};

using MapFn = std::function<ConvexBody(const Vector& p, const Vector& x)>;

/// Halfspace description of S + C for V-representable S, from the facet
/// normals of the homogenized cone over (points,1) and (rays of S and C,0).
struct SumFacets {
  std::vector<Vector> normals;  // unit
  std::vector<double> offsets;
  std::optional<Interval> hull1d;
};
SumFacets sum_facets(const ConvexBody& S, const ConeSpec& C);

/// B(Phi(u), alpha*r) within B(K, r) for K = Phi(x)+C. For closed convex K
/// this holds iff every point a of Phi(u) satisfies a + (alpha-1)rB within K,
/// so vertices, rays and the facets of K decide it exactly; 1-D reduces to
/// endpoint comparison.
bool increase_inclusion(const ConvexBody& phi_u, const SumFacets& K, double alpha, double r, double tol);

/// Searches a witness u in ball(x,r) for every sample (p,x) and radius.
IncreaseCertificate check_c_increase(const MapFn& F, const ConeSpec& C, double alpha,
                                     const std::vector<std::pair<Vector, Vector>>& samples,
                                     const IncreaseOptions& opt = {});

/// x sampled on the window lattice; p is passed through unchanged.
IncreaseCertificate check_c_increase_global(const std::function<ConvexBody(const Vector&)>& slice, const ConeSpec& C,
                                            double alpha, const Box& window, const IncreaseOptions& opt = {});
/// x in ball(xbar, delta), radii below delta.
IncreaseCertificate check_c_increase_local(const std::function<ConvexBody(const Vector&)>& slice, const ConeSpec& C,
                                           double alpha, const Vector& xbar, double delta,
                                           const IncreaseOptions& opt = {});
/// (p,x) in ball(pbar,delta) x ball(xbar,delta), radii below delta.
IncreaseCertificate check_c_increase_uniform(const InclusionInstance& inst, double alpha, double delta,
                                             const IncreaseOptions& opt = {});

/// Largest alpha in [1+1e-6, cap] for which check() succeeds, by bisection; 1 if none.
double largest_certified_alpha(const std::function<bool(double)>& check, double cap = 10.0, int iters = 30);

struct InteriorityResult {
  bool ok = false;
  Vector witness;       // unit vector
  double margin = 0.0;  // eps with L(witness + eps*B) within C for every L, capped at 1
};

/// Best unit u for the closed-form margin min over (L, a_i) of -a_i.Lu / |L^T a_i|,
/// refined by pattern search on the sphere. Exact over conv(G) because the
/// constraint is convex in L.
InteriorityResult interiority_check(const std::vector<Matrix>& G, const ConeSpec& C, int search_budget = 0);

struct FanBound {
  bool applicable = false;
  std::string reason;
  double eta_bar = 0.0;             // sampled inf of cov over conv(G)
  double value = 0.0;               // eta_bar + 1
  double constructive_bound = 0.0;  // 1 + rho*eta_bar, rho = margin of the unit witness
  double rho = 0.0;
  InteriorityResult interiority;
  int samples = 0;
  std::vector<std::string> flags;
};

FanBound fan_increase_bound(const std::vector<Matrix>& G, const ConeSpec& C, int sample_n = 512,
                            std::uint64_t seed = 20240601);

}  // namespace svi
