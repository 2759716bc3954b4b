#include "svi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace svi {

namespace {

constexpr double kCoefTol = 1e-10;
constexpr double kRankTol = 1e-10;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    std::ostringstream os;
    os << "ambient dimension " << dim << " outside [1," << kMaxDim << "]";
    throw InputError(os.str());
  }
}

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string(what) + " has non-finite entries");
}

void require_same_dim(int a, int b, const char* op) {
  if (a != b) {
    std::ostringstream os;
    os << op << ": dimension mismatch (" << a << " vs " << b << ")";
    throw InputError(os.str());
  }
}

// Calls fn(subset) for each k-subset of {0..n-1}.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

int numeric_rank(const Matrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > kRankTol * scale ? 1 : 0;
  return r;
}

void push_unique(std::vector<Vector>& vs, const Vector& v, double tol) {
  for (const auto& w : vs) {
    if ((w - v).norm() <= tol * std::max(1.0, v.norm())) return;
  }
  vs.push_back(v);
}

Matrix stack_columns(const std::vector<Vector>& vs, int dim) {
  Matrix M(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = vs[j];
  return M;
}

std::vector<Vector> enlargement_directions(int dim) {
  switch (dim) {
    case 1: return unit_directions(1, 2);
    case 2: return unit_directions(2, 256);
    case 3: return unit_directions(3, 1024);
    default: return unit_directions(dim, 2048);
  }
}

}  // namespace

double Interval::dist(double t) const {
  if (t < lo) return lo - t;
  if (t > hi) return t - hi;
  return 0.0;
}

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

double excess(const Interval& a, const Interval& b) {
  if (a.hi == kInf && b.hi < kInf) return kInf;
  if (a.lo == -kInf && b.lo > -kInf) return kInf;
  double e = 0.0;
  if (std::isfinite(a.lo)) e = std::max(e, b.dist(a.lo));
  if (std::isfinite(a.hi)) e = std::max(e, b.dist(a.hi));
  return e;
}


// ---------------------------------------------------------------------------
// polyhedral kernels

namespace detail {

Vector project_vrep(const Vector& x, const std::vector<Vector>& points, const std::vector<Vector>& rays) {
  const int m = static_cast<int>(x.size());
  const int np = static_cast<int>(points.size());
  const int nr = static_cast<int>(rays.size());
  if (np == 0) throw InputError("project_vrep: no points");

  double best = kInf;
  Vector best_pt = points.front();

  for (int kp = 1; kp <= std::min(np, m + 1); ++kp) {
    for_each_subset(np, kp, [&](const std::vector<int>& ps) {
      const Vector& v0 = points[ps[0]];
      for (int kr = 0; kr <= std::min(nr, m - (kp - 1)); ++kr) {
        for_each_subset(nr, kr, [&](const std::vector<int>& rs) {
          if (best == 0.0) return;
          const int cols = (kp - 1) + kr;
          Vector q;
          if (cols == 0) {
            q = v0;
          } else {
            Matrix M(m, cols);
            for (int i = 1; i < kp; ++i) M.col(i - 1) = points[ps[i]] - v0;
            for (int j = 0; j < kr; ++j) M.col(kp - 1 + j) = rays[rs[j]];
            Eigen::ColPivHouseholderQR<Matrix> qr(M);
            qr.setThreshold(kRankTol);
            if (qr.rank() < cols) return;
            const Vector c = qr.solve(x - v0);
            double lam0 = 1.0;
            for (int i = 0; i < kp - 1; ++i) {
              if (c[i] < -kCoefTol) return;
              lam0 -= c[i];
            }
            if (lam0 < -kCoefTol) return;
            for (int j = 0; j < kr; ++j) {
              if (c[kp - 1 + j] < -kCoefTol) return;
            }
            q = v0 + M * c;
          }
          const double d = (x - q).norm();
          if (d < best) {
            best = d;
            best_pt = q;
          }
        });
      }
    });
  }
  return best_pt;
}

std::optional<Vector> project_hrep(const Vector& x, const std::vector<Halfspace>& hs) {
  const int m = static_cast<int>(x.size());
  std::vector<Vector> n;
  std::vector<double> b;
  for (const auto& h : hs) {
    const double len = h.normal.norm();
    if (len == 0.0) {
      if (h.offset < 0.0) return std::nullopt;
      continue;
    }
    n.push_back(h.normal / len);
    b.push_back(h.offset / len);
  }
  const int k = static_cast<int>(n.size());
  auto feasible = [&](const Vector& y) {
    for (int i = 0; i < k; ++i) {
      if (n[i].dot(y) > b[i] + kCoefTol * std::max(1.0, std::abs(b[i]))) return false;
    }
    return true;
  };
  if (feasible(x)) return x;

  double best = kInf;
  std::optional<Vector> best_pt;
  for (int s = 1; s <= std::min(m, k); ++s) {
    for_each_subset(k, s, [&](const std::vector<int>& act) {
      Matrix N(s, m);
      Vector bs(s);
      for (int i = 0; i < s; ++i) {
        N.row(i) = n[act[i]].transpose();
        bs[i] = b[act[i]];
      }
      const Matrix G = N * N.transpose();
      Eigen::FullPivLU<Matrix> lu(G);
      lu.setThreshold(kRankTol);
      if (lu.rank() < s) return;
      const Vector nu = lu.solve(N * x - bs);
      const Vector y = x - N.transpose() * nu;
      if (!feasible(y)) return;
      const double d = (x - y).norm();
      if (d < best) {
        best = d;
        best_pt = y;
      }
    });
  }
  return best_pt;
}

VPolyhedron hrep_to_vrep(const std::vector<Halfspace>& hs, int dim) {
  std::vector<Vector> n;
  std::vector<double> b;
  for (const auto& h : hs) {
    if (h.normal.size() != dim) throw InputError("halfspace normal dimension mismatch");
    const double len = h.normal.norm();
    if (len == 0.0) {
      if (h.offset < 0.0) throw InputError("empty polyhedron (0 <= negative offset)");
      continue;
    }
    n.push_back(h.normal / len);
    b.push_back(h.offset / len);
  }
  VPolyhedron out;
  const int k = static_cast<int>(n.size());
  if (k == 0) {
    out.points.push_back(Vector::Zero(dim));
    for (int i = 0; i < dim; ++i) {
      Vector e = Vector::Zero(dim);
      e[i] = 1.0;
      out.rays.push_back(e);
      out.rays.push_back(-e);
    }
    return out;
  }
  Matrix A(k, dim);
  Vector bvec(k);
  for (int i = 0; i < k; ++i) {
    A.row(i) = n[i].transpose();
    bvec[i] = b[i];
  }
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const int r = numeric_rank(A);
  const Matrix V = svd.matrixV();
  const Matrix Q = V.leftCols(r);
  const Matrix L = V.rightCols(dim - r);
  const Matrix Az = A * Q;

  auto feasible_z = [&](const Vector& z) {
    const Vector lhs = Az * z;
    for (int i = 0; i < k; ++i) {
      if (lhs[i] > bvec[i] + 1e-9 * std::max(1.0, std::abs(bvec[i]))) return false;
    }
    return true;
  };

  for_each_subset(k, r, [&](const std::vector<int>& rows) {
    Matrix S(r, r);
    Vector bs(r);
    for (int i = 0; i < r; ++i) {
      S.row(i) = Az.row(rows[i]);
      bs[i] = bvec[rows[i]];
    }
    Eigen::FullPivLU<Matrix> lu(S);
    lu.setThreshold(kRankTol);
    if (lu.rank() < r) return;
    const Vector z = lu.solve(bs);
    if (feasible_z(z)) push_unique(out.points, Q * z, 1e-9);
  });
  if (out.points.empty()) throw InputError("empty polyhedron (no feasible vertex)");

  auto try_ray = [&](const Vector& dz) {
    for (double sgn : {1.0, -1.0}) {
      const Vector d = sgn * dz;
      const Vector lhs = Az * d;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) ok = lhs[i] <= 1e-9;
      if (ok) push_unique(out.rays, (Q * d).normalized(), 1e-9);
    }
  };
  if (r == 1) {
    try_ray(Vector::Ones(1));
  } else if (r > 1) {
    for_each_subset(k, r - 1, [&](const std::vector<int>& rows) {
      Matrix S(r - 1, r);
      for (int i = 0; i < r - 1; ++i) S.row(i) = Az.row(rows[i]);
      if (numeric_rank(S) < r - 1) return;
      Eigen::JacobiSVD<Matrix> s2(S, Eigen::ComputeFullV);
      try_ray(s2.matrixV().col(r - 1));
    });
  }
  for (Eigen::Index j = 0; j < L.cols(); ++j) {
    push_unique(out.rays, L.col(j), 1e-9);
    push_unique(out.rays, -L.col(j), 1e-9);
  }
  return out;
}

std::vector<Vector> cone_normals(const std::vector<Vector>& generators, int dim) {
  std::vector<Vector> normals;
  if (generators.empty()) {
    for (int i = 0; i < dim; ++i) {
      Vector e = Vector::Zero(dim);
      e[i] = 1.0;
      normals.push_back(e);
      normals.push_back(-e);
    }
    return normals;
  }
  const Matrix G = stack_columns(generators, dim);
  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullU);
  const int k = numeric_rank(G);
  const Matrix U = svd.matrixU().leftCols(k);
  const Matrix W = svd.matrixU().rightCols(dim - k);
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    push_unique(normals, W.col(j), 1e-9);
    push_unique(normals, -W.col(j), 1e-9);
  }
  const Matrix Gz = U.transpose() * G;  // k x ng
  const int ng = static_cast<int>(generators.size());
  auto try_normal = [&](const Vector& nz) {
    const Vector dots = Gz.transpose() * nz;
    const double scale = 1e-9;
    if ((dots.array() <= scale).all()) push_unique(normals, (U * nz).normalized(), 1e-9);
    else if ((dots.array() >= -scale).all()) push_unique(normals, (-(U * nz)).normalized(), 1e-9);
  };
  if (k == 1) {
    try_normal(Vector::Ones(1));
  } else {
    for_each_subset(ng, k - 1, [&](const std::vector<int>& cols) {
      Matrix S(k - 1, k);
      for (int i = 0; i < k - 1; ++i) S.row(i) = Gz.col(cols[i]).transpose();
      if (numeric_rank(S) < k - 1) return;
      Eigen::JacobiSVD<Matrix> s2(S, Eigen::ComputeFullV);
      try_normal(s2.matrixV().col(k - 1));
    });
  }
  return normals;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ConvexBody

ConvexBody::ConvexBody(Repr repr, int dim, std::shared_ptr<const VPolyhedron> vrep)
    : repr_(std::move(repr)), dim_(dim), vrep_(std::move(vrep)) {
  init_hull1d();
}

void ConvexBody::init_hull1d() {
  if (dim_ != 1) return;
  if (const auto* iv = std::get_if<Interval>(&repr_)) {
    hull1d_ = *iv;
    return;
  }
  if (const auto* en = std::get_if<Enlargement>(&repr_)) {
    const Interval b = *en->base->hull1d();
    hull1d_ = Interval{b.lo - en->radius, b.hi + en->radius};
    return;
  }
  Interval h{kInf, -kInf};
  for (const auto& p : vrep_->points) {
    h.lo = std::min(h.lo, p[0]);
    h.hi = std::max(h.hi, p[0]);
  }
  for (const auto& r : vrep_->rays) {
    if (r[0] > 0.0) h.hi = kInf;
    if (r[0] < 0.0) h.lo = -kInf;
  }
  hull1d_ = h;
}

std::string_view ConvexBody::kind() const {
  switch (repr_.index()) {
    case 0: return "polytope";
    case 1: return "hpolyhedron";
    case 2: return "interval";
    case 3: return "cone";
    case 4: return "shifted_cone";
    case 5: return "vpolyhedron";
    default: return "enlargement";
  }
}

ConvexBody ConvexBody::polytope(std::vector<Vector> vertices) {
  if (vertices.empty()) throw InputError("polytope needs at least one vertex");
  const int dim = static_cast<int>(vertices.front().size());
  check_dim(dim);
  for (const auto& v : vertices) {
    require_same_dim(static_cast<int>(v.size()), dim, "polytope vertex");
    check_finite(v, "polytope vertex");
  }
  auto vr = std::make_shared<VPolyhedron>(VPolyhedron{vertices, {}});
  return ConvexBody(Polytope{std::move(vertices)}, dim, std::move(vr));
}

ConvexBody ConvexBody::hpolyhedron(std::vector<Halfspace> halfspaces, int dim) {
  check_dim(dim);
  for (const auto& h : halfspaces) {
    require_same_dim(static_cast<int>(h.normal.size()), dim, "halfspace normal");
    check_finite(h.normal, "halfspace normal");
    if (!std::isfinite(h.offset)) throw InputError("halfspace offset must be finite");
  }
  auto vr = std::make_shared<VPolyhedron>(detail::hrep_to_vrep(halfspaces, dim));
  return ConvexBody(HPolyhedron{std::move(halfspaces)}, dim, std::move(vr));
}

ConvexBody ConvexBody::interval(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw InputError("interval endpoint is NaN");
  if (lo > hi) throw InputError("interval needs lo <= hi");
  if (lo == kInf || hi == -kInf) throw InputError("interval is empty");
  VPolyhedron vr;
  if (std::isfinite(lo)) vr.points.push_back(make_vector({lo}));
  if (std::isfinite(hi) && hi != lo) vr.points.push_back(make_vector({hi}));
  if (vr.points.empty()) vr.points.push_back(make_vector({0.0}));
  if (hi == kInf) vr.rays.push_back(make_vector({1.0}));
  if (lo == -kInf) vr.rays.push_back(make_vector({-1.0}));
  return ConvexBody(Interval{lo, hi}, 1, std::make_shared<VPolyhedron>(std::move(vr)));
}

ConvexBody ConvexBody::cone(std::vector<Vector> generators, int dim) {
  check_dim(dim);
  for (const auto& g : generators) {
    require_same_dim(static_cast<int>(g.size()), dim, "cone generator");
    check_finite(g, "cone generator");
    if (g.norm() == 0.0) throw InputError("cone generators must be nonzero");
  }
  auto vr = std::make_shared<VPolyhedron>(VPolyhedron{{Vector::Zero(dim)}, generators});
  return ConvexBody(PolyhedralCone{std::move(generators)}, dim, std::move(vr));
}

ConvexBody ConvexBody::shifted_cone(Vector apex, std::vector<Vector> generators) {
  const int dim = static_cast<int>(apex.size());
  check_dim(dim);
  check_finite(apex, "cone apex");
  for (const auto& g : generators) {
    require_same_dim(static_cast<int>(g.size()), dim, "cone generator");
    check_finite(g, "cone generator");
    if (g.norm() == 0.0) throw InputError("cone generators must be nonzero");
  }
  auto vr = std::make_shared<VPolyhedron>(VPolyhedron{{apex}, generators});
  return ConvexBody(ShiftedCone{std::move(apex), PolyhedralCone{std::move(generators)}}, dim, std::move(vr));
}

ConvexBody ConvexBody::vpolyhedron(std::vector<Vector> points, std::vector<Vector> rays) {
  if (points.empty()) throw InputError("vpolyhedron needs at least one point");
  const int dim = static_cast<int>(points.front().size());
  check_dim(dim);
  for (const auto& p : points) {
    require_same_dim(static_cast<int>(p.size()), dim, "vpolyhedron point");
    check_finite(p, "vpolyhedron point");
  }
  for (const auto& r : rays) {
    require_same_dim(static_cast<int>(r.size()), dim, "vpolyhedron ray");
    check_finite(r, "vpolyhedron ray");
    if (r.norm() == 0.0) throw InputError("vpolyhedron rays must be nonzero");
  }
  auto vr = std::make_shared<VPolyhedron>(VPolyhedron{points, rays});
  return ConvexBody(VPolyhedron{std::move(points), std::move(rays)}, dim, std::move(vr));
}

ConvexBody ConvexBody::enlargement(const ConvexBody& base, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InputError("enlargement radius must be finite and >= 0");
  if (const auto* inner = base.as_enlargement()) {
    return enlargement(*inner->base, inner->radius + radius);
  }
  auto b = std::make_shared<const ConvexBody>(base);
  return ConvexBody(Enlargement{b, radius}, base.dim(), base.vrep_);
}

// ---------------------------------------------------------------------------
// ConeSpec

ConeSpec ConeSpec::from_generators(std::vector<Vector> generators, int dim) {
  check_dim(dim);
  ConeSpec c;
  c.dim_ = dim;
  c.generators_ = std::move(generators);
  for (const auto& g : c.generators_) {
    require_same_dim(static_cast<int>(g.size()), dim, "cone generator");
    if (g.norm() == 0.0) throw InputError("cone generators must be nonzero");
  }
  c.normals_ = detail::cone_normals(c.generators_, dim);
  c.finish();
  return c;
}

ConeSpec ConeSpec::from_normals(std::vector<Vector> normals, int dim) {
  check_dim(dim);
  std::vector<Halfspace> hs;
  for (const auto& n : normals) {
    require_same_dim(static_cast<int>(n.size()), dim, "cone normal");
    hs.push_back({n, 0.0});
  }
  const VPolyhedron v = detail::hrep_to_vrep(hs, dim);
  ConeSpec c;
  c.dim_ = dim;
  c.generators_ = v.rays;
  c.normals_.clear();
  for (const auto& n : normals) {
    if (n.norm() > 0.0) c.normals_.push_back(n.normalized());
  }
  c.finish();
  return c;
}

ConeSpec ConeSpec::from_both(std::vector<Vector> generators, std::vector<Vector> normals, int dim) {
  check_dim(dim);
  ConeSpec c;
  c.dim_ = dim;
  c.generators_ = std::move(generators);
  for (const auto& g : c.generators_) {
    require_same_dim(static_cast<int>(g.size()), dim, "cone generator");
    if (g.norm() == 0.0) throw InputError("cone generators must be nonzero");
  }
  for (const auto& n : normals) {
    require_same_dim(static_cast<int>(n.size()), dim, "cone normal");
    if (n.norm() > 0.0) c.normals_.push_back(n.normalized());
  }
  // generators inside the halfspaces
  for (const auto& g : c.generators_) {
    for (const auto& n : c.normals_) {
      if (n.dot(g) > 1e-9 * g.norm()) throw InputError("cone generators violate the given halfspaces");
    }
  }
  // extreme rays of the halfspace form inside cone(generators)
  std::vector<Halfspace> hs;
  for (const auto& n : c.normals_) hs.push_back({n, 0.0});
  const VPolyhedron v = detail::hrep_to_vrep(hs, dim);
  for (const auto& r : v.rays) {
    bool inside = false;
    if (!c.generators_.empty()) {
      const Vector q = detail::project_vrep(r, {Vector::Zero(dim)}, c.generators_);
      inside = (q - r).norm() <= 1e-7;
    }
    if (!inside) throw InputError("cone halfspaces admit a ray outside cone(generators)");
  }
  c.finish();
  return c;
}

ConeSpec ConeSpec::orthant(int dim) {
  std::vector<Vector> gens;
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e[i] = 1.0;
    gens.push_back(e);
  }
  std::vector<Vector> normals;
  for (const auto& e : gens) normals.push_back(-e);
  return from_both(std::move(gens), std::move(normals), dim);
}

void ConeSpec::finish() {
  Matrix A(static_cast<Eigen::Index>(normals_.size()), dim_);
  for (std::size_t i = 0; i < normals_.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = normals_[i].transpose();
  pointed_ = numeric_rank(A) == dim_;
  has_interior_ = !generators_.empty() && numeric_rank(stack_columns(generators_, dim_)) == dim_;
  body_ = std::make_shared<const ConvexBody>(ConvexBody::cone(generators_, dim_));
  std::vector<Halfspace> hs;
  for (const auto& n : normals_) hs.push_back({n, 0.0});
  h_body_ = std::make_shared<const ConvexBody>(ConvexBody::hpolyhedron(std::move(hs), dim_));
  std::vector<bool> axis(static_cast<std::size_t>(dim_), false);
  orthant_ = static_cast<int>(generators_.size()) == dim_;
  for (const auto& g : generators_) {
    Eigen::Index k = 0;
    const double top = g.maxCoeff(&k);
    const bool unit = top > 0.0 && (g.array() != 0.0).count() == 1 && !axis[static_cast<std::size_t>(k)];
    if (!unit) orthant_ = false;
    else axis[static_cast<std::size_t>(k)] = true;
  }
}

double ConeSpec::dist(const Vector& y) const {
  require_same_dim(static_cast<int>(y.size()), dim_, "cone distance");
  if (orthant_) return y.cwiseMin(0.0).norm();
  return dist_point_set(y, *h_body_);
}

bool ConeSpec::is_whole_space() const { return normals_.empty(); }

bool ConeSpec::contains(const Vector& y, double tol) const {
  for (const auto& n : normals_) {
    if (n.dot(y) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// metric operations

double dist_point_set(const Vector& x, const ConvexBody& S) {
  require_same_dim(static_cast<int>(x.size()), S.dim(), "dist_point_set");
  if (S.dim() == 1) return S.hull1d()->dist(x[0]);
  if (const auto* en = S.as_enlargement()) {
    return std::max(0.0, dist_point_set(x, *en->base) - en->radius);
  }
  return (x - project(x, S)).norm();
}

Vector project(const Vector& x, const ConvexBody& S) {
  require_same_dim(static_cast<int>(x.size()), S.dim(), "project");
  if (S.dim() == 1) {
    const Interval& h = *S.hull1d();
    return make_vector({std::clamp(x[0], h.lo, h.hi)});
  }
  if (const auto* en = S.as_enlargement()) {
    const Vector pb = project(x, *en->base);
    const double d = (x - pb).norm();
    if (d <= en->radius) return x;
    return pb + en->radius * (x - pb) / d;
  }
  if (const auto* hp = S.as_hpolyhedron()) {
    if (auto y = detail::project_hrep(x, hp->halfspaces)) return *y;
  }
  return detail::project_vrep(x, S.vrep().points, S.vrep().rays);
}

double support(const ConvexBody& S, const Vector& d) {
  require_same_dim(static_cast<int>(d.size()), S.dim(), "support");
  if (S.dim() == 1) {
    const Interval& h = *S.hull1d();
    if (d[0] > 0.0) return h.hi == kInf ? kInf : d[0] * h.hi;
    if (d[0] < 0.0) return h.lo == -kInf ? kInf : d[0] * h.lo;
    return 0.0;
  }
  double extra = 0.0;
  if (const auto* en = S.as_enlargement()) extra = en->radius * d.norm();
  const auto& vr = S.vrep();
  for (const auto& r : vr.rays) {
    if (d.dot(r) > 1e-12 * d.norm() * r.norm()) return kInf;
  }
  double best = -kInf;
  for (const auto& p : vr.points) best = std::max(best, d.dot(p));
  return best + extra;
}

bool in_recession_cone(const ConvexBody& S, const Vector& d, double tol) {
  require_same_dim(static_cast<int>(d.size()), S.dim(), "in_recession_cone");
  const double len = d.norm();
  if (len == 0.0) return true;
  if (S.dim() == 1) {
    const Interval& h = *S.hull1d();
    return d[0] > 0.0 ? h.hi == kInf : h.lo == -kInf;
  }
  const ConvexBody* base = &S;
  if (const auto* en = S.as_enlargement()) base = en->base.get();
  if (const auto* hp = base->as_hpolyhedron()) {
    for (const auto& h : hp->halfspaces) {
      if (h.normal.dot(d) > tol * len * h.normal.norm()) return false;
    }
    return true;
  }
  const auto& rays = base->vrep().rays;
  if (rays.empty()) return false;
  const Vector q = detail::project_vrep(d, {Vector::Zero(S.dim())}, rays);
  return (q - d).norm() <= tol * len;
}

double excess(const ConvexBody& A, const ConvexBody& B) {
  require_same_dim(A.dim(), B.dim(), "excess");
  if (A.dim() == 1) return excess(*A.hull1d(), *B.hull1d());

  const ConvexBody* base = &A;
  double radius = 0.0;
  if (const auto* en = A.as_enlargement()) {
    base = en->base.get();
    radius = en->radius;
  }
  const auto& vr = base->vrep();
  for (const auto& r : vr.rays) {
    if (!in_recession_cone(B, r)) return kInf;
  }
  double e = 0.0;
  if (radius == 0.0) {
    for (const auto& p : vr.points) e = std::max(e, dist_point_set(p, B));
    return e;
  }
  // sup of the convex function dist(.,B) over conv(points) + radius*ball sits at
  // some point + radius*d; outside B the outward normal is the maximizer.
  const auto dirs = enlargement_directions(A.dim());
  for (const auto& p : vr.points) {
    const Vector q = project(p, B);
    const double d0 = (p - q).norm();
    if (d0 > 1e-12) {
      const Vector n = (p - q) / d0;
      e = std::max(e, dist_point_set(p + radius * n, B));
    } else {
      for (const auto& d : dirs) e = std::max(e, dist_point_set(p + radius * d, B));
    }
  }
  return e;
}

double hausdorff(const ConvexBody& A, const ConvexBody& B) {
  return std::max(excess(A, B), excess(B, A));
}

bool enlargement_contains(const ConvexBody& S, double r, const Vector& x, double tol) {
  if (r < 0.0) throw InputError("enlargement radius must be >= 0");
  return dist_point_set(x, S) <= r + tol;
}

ConvexBody minkowski_with_cone(const ConvexBody& S, const ConeSpec& C) {
  require_same_dim(S.dim(), C.dim(), "minkowski_with_cone");
  if (S.is_enlargement()) throw InputError("minkowski_with_cone: enlargements are not supported");
  const auto& vr = S.vrep();
  std::vector<Vector> rays = vr.rays;
  for (const auto& g : C.generators()) rays.push_back(g);
  return ConvexBody::vpolyhedron(vr.points, std::move(rays));
}

double support_distance_lower_bound(const ConvexBody& S, const std::vector<Vector>& dirs) {
  double lowest = 0.0;  // u = 0
  for (const auto& d : dirs) lowest = std::min(lowest, support(S, d));
  return -lowest;
}

ExcessIdentities excess_identities_check(const ConvexBody& S, const ConeSpec& C, double r) {
  require_same_dim(S.dim(), C.dim(), "excess_identities_check");
  if (r < 0.0) throw InputError("excess_identities_check: radius must be >= 0");
  ExcessIdentities out;
  out.base_excess = excess(S, C.body());
  if (!std::isfinite(out.base_excess)) {
    out.note = "infinite excess; identities skipped";
    return out;
  }
  out.cone_sum.applicable = true;
  out.cone_sum.lhs = excess(minkowski_with_cone(S, C), C.h_body());
  out.cone_sum.rhs = out.base_excess;
  if (out.base_excess > 1e-9 && r > 0.0) {
    out.enlarged.applicable = true;
    out.enlarged.lhs = excess(ConvexBody::enlargement(S, r), C.h_body());
    out.enlarged.rhs = out.base_excess + r;
  } else {
    out.note = "e(S,C) = 0 or r = 0; enlargement identity not applicable";
  }
  return out;
}

}  // namespace svi
