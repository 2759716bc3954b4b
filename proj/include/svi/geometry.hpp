#pragma once

#include "svi/core.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace svi {

/// normal . y <= offset
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

struct Polytope {
  std::vector<Vector> vertices;
};

struct HPolyhedron {
  std::vector<Halfspace> halfspaces;
};

/// 1-D only. Infinite endpoints denote unbounded sides.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double t, double tol = 0.0) const { return t >= lo - tol && t <= hi + tol; }
  double dist(double t) const;
  bool bounded() const;
};

struct PolyhedralCone {
  std::vector<Vector> generators;
};

struct ShiftedCone {
  Vector apex;
  PolyhedralCone cone;
};

/// conv(points) + cone(rays).
struct VPolyhedron {
  std::vector<Vector> points;
  std::vector<Vector> rays;
};

class ConvexBody;

struct Enlargement {
  std::shared_ptr<const ConvexBody> base;
  double radius = 0.0;
};

/// A nonempty closed convex subset of R^m, m <= kMaxDim, held in one of a
/// few finite representations. Every non-enlargement value also carries a
/// V-representation (points + rays), computed once at construction.
class ConvexBody {
 public:
  using Repr = std::variant<Polytope, HPolyhedron, Interval, PolyhedralCone, ShiftedCone, VPolyhedron,
                            Enlargement>;

  static ConvexBody polytope(std::vector<Vector> vertices);
  static ConvexBody singleton(const Vector& v) { return polytope({v}); }
  static ConvexBody hpolyhedron(std::vector<Halfspace> halfspaces, int dim);
  static ConvexBody interval(double lo, double hi);
  static ConvexBody cone(std::vector<Vector> generators, int dim);
  static ConvexBody shifted_cone(Vector apex, std::vector<Vector> generators);
  static ConvexBody vpolyhedron(std::vector<Vector> points, std::vector<Vector> rays);
  static ConvexBody enlargement(const ConvexBody& base, double radius);

  int dim() const { return dim_; }
  const Repr& repr() const { return repr_; }
  std::string_view kind() const;

  bool is_enlargement() const { return std::holds_alternative<Enlargement>(repr_); }
  const Enlargement* as_enlargement() const { return std::get_if<Enlargement>(&repr_); }
  const HPolyhedron* as_hpolyhedron() const { return std::get_if<HPolyhedron>(&repr_); }

  /// V-representation of the set, or of the base for an enlargement.
  const VPolyhedron& vrep() const { return *vrep_; }
  /// The set itself when dim()==1 (enlargements included).
  const std::optional<Interval>& hull1d() const { return hull1d_; }

  bool bounded() const { return vrep_->rays.empty(); }

 private:
  ConvexBody(Repr repr, int dim, std::shared_ptr<const VPolyhedron> vrep);
  void init_hull1d();

  Repr repr_;
  int dim_ = 0;
  std::shared_ptr<const VPolyhedron> vrep_;
  std::optional<Interval> hull1d_;
};

/// A closed convex cone stored by generators and by halfspaces {a . y <= 0}.
class ConeSpec {
 public:
  static ConeSpec from_generators(std::vector<Vector> generators, int dim);
  static ConeSpec from_normals(std::vector<Vector> normals, int dim);
  /// Both representations given; validated by mutual containment.
  static ConeSpec from_both(std::vector<Vector> generators, std::vector<Vector> normals, int dim);
  static ConeSpec orthant(int dim);
  static ConeSpec halfline() { return orthant(1); }

  int dim() const { return dim_; }
  const std::vector<Vector>& generators() const { return generators_; }
  const std::vector<Vector>& normals() const { return normals_; }
  bool pointed() const { return pointed_; }
  bool has_interior() const { return has_interior_; }
  bool is_zero() const { return generators_.empty(); }
  bool is_whole_space() const;

  /// The cone as a generator-form body.
  const ConvexBody& body() const { return *body_; }
  /// The cone as a halfspace-form body; distances go through a separate solver.
  const ConvexBody& h_body() const { return *h_body_; }

  bool contains(const Vector& y, double tol) const;
  /// Distance from y to the cone; closed form for the nonnegative orthant.
  double dist(const Vector& y) const;

 private:
  ConeSpec() = default;
  void finish();

  int dim_ = 0;
  std::vector<Vector> generators_;
  std::vector<Vector> normals_;
  bool pointed_ = false;
  bool has_interior_ = false;
  bool orthant_ = false;
  std::shared_ptr<const ConvexBody> body_;
  std::shared_ptr<const ConvexBody> h_body_;
};

/// Euclidean distance from x to S.
double dist_point_set(const Vector& x, const ConvexBody& S);

/// Nearest point of S to x.
Vector project(const Vector& x, const ConvexBody& S);

/// sup_{s in S} <d, s>, possibly +inf.
double support(const ConvexBody& S, const Vector& d);

/// Whether d lies in the recession cone of S (within tol relative to |d|).
bool in_recession_cone(const ConvexBody& S, const Vector& d, double tol = 1e-9);

/// e(A,B) = sup_{a in A} dist(a,B). Recession cones are compared first, so an
/// unbounded A whose recession directions escape B gives +inf exactly.
double excess(const ConvexBody& A, const ConvexBody& B);

/// Closed-form excess between 1-D intervals.
double excess(const Interval& A, const Interval& B);

/// Pompeiu-Hausdorff distance max{e(A,B), e(B,A)}.
double hausdorff(const ConvexBody& A, const ConvexBody& B);

/// x in B(S,r) = {y : dist(y,S) <= r}, up to tol.
bool enlargement_contains(const ConvexBody& S, double r, const Vector& x, double tol = 1e-9);

/// S + C for V-representable S.
ConvexBody minkowski_with_cone(const ConvexBody& S, const ConeSpec& C);

/// -inf_{|u|<=1} support(S,u), a lower bound on dist(0,S) for closed convex S.
double support_distance_lower_bound(const ConvexBody& S, const std::vector<Vector>& dirs);

struct IdentityCheck {
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ExcessIdentities {
  double base_excess = 0.0;  // e(S,C)
  IdentityCheck cone_sum;     // e(S+C,C) = e(S,C)
  IdentityCheck enlarged;     // e(B(S,r),C) = e(S,C)+r when e(S,C)>0
  std::string note;
};

/// Evaluates both sides of the two excess identities for a closed convex cone.
/// Left-hand sides use the halfspace form of C, right-hand sides the generator form.
ExcessIdentities excess_identities_check(const ConvexBody& S, const ConeSpec& C, double r);

namespace detail {

/// Exact projection onto conv(points)+cone(rays) by enumerating affinely
/// independent generator subsets (Caratheodory); fine for m <= 4.
Vector project_vrep(const Vector& x, const std::vector<Vector>& points, const std::vector<Vector>& rays);

/// Exact projection onto {y : n_i . y <= b_i} by enumerating active sets.
std::optional<Vector> project_hrep(const Vector& x, const std::vector<Halfspace>& hs);

/// Vertices, extreme rays and lineality (as +/- rays) of an H-polyhedron.
VPolyhedron hrep_to_vrep(const std::vector<Halfspace>& hs, int dim);

/// Facet normals of cone(generators), including +/- normals of the span's complement.
std::vector<Vector> cone_normals(const std::vector<Vector>& generators, int dim);

}  // namespace detail

}  // namespace svi
