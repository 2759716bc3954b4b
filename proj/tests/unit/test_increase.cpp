#include "svi/expression.hpp"
#include "svi/increase.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace svi;

namespace {

Box box1(double lo, double hi) { return {make_vector({lo}), make_vector({hi})}; }

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

ConvexBody halfline_at(const Vector& x) { return ConvexBody::interval(x[0], kInf); }

}  // namespace

TEST_CASE("cov of diagonal matrices is the smallest absolute entry") {
  oracle::Rand r(23);
  for (int i = 0; i < 40; ++i) {
    const int n = 1 + r.below(4);
    const oracle::Vec d = oracle::random_point(r, n, -5.0, 5.0);
    CHECK(cov_matrix(d.asDiagonal().toDenseMatrix()) == doctest::Approx(oracle::sigma_min_diagonal(d)).epsilon(1e-14));
  }
  CHECK(cov_matrix(mat({{1, 0, 0}, {0, 1, 0}})) == doctest::Approx(1.0));
  CHECK(cov_matrix(mat({{1, 0}, {0, 1}, {1, 1}})) == 0.0);
}

TEST_CASE("halfline epigraph map: alpha 2 certified, 2.5 rejected") {
  const auto C = ConeSpec::halfline();
  const Box window = box1(-2, 2);
  for (double alpha : {1.5, 2.0, 2.5, 3.0}) {
    const auto cert = check_c_increase_global(halfline_at, C, alpha, window, {});
    bool oracle_ok = true;
    for (const auto& x : box_grid(window, 9)) {
      for (double rr : IncreaseOptions{}.radii) oracle_ok = oracle_ok && oracle::halfline_increase_holds(x[0], rr, alpha);
    }
    CHECK(cert.valid() == oracle_ok);
  }
  CHECK(check_c_increase_global(halfline_at, C, 2.0, window, {}).valid());
  CHECK_FALSE(check_c_increase_global(halfline_at, C, 2.5, window, {}).valid());
}

TEST_CASE("a constant map is never metrically increasing") {
  auto slice = [](const Vector&) { return ConvexBody::interval(1.0, 2.0); };
  const auto cert = check_c_increase_global(slice, ConeSpec::halfline(), 1.0 + 1e-6, box1(-1, 1), {});
  CHECK_FALSE(cert.valid());
  CHECK_FALSE(cert.failures.empty());
}

TEST_CASE("largest certified alpha for the halfline map is 2") {
  auto check = [](double a) {
    return check_c_increase_global(halfline_at, ConeSpec::halfline(), a, box1(-2, 2), {}).valid();
  };
  CHECK(largest_certified_alpha(check, 10.0, 30) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("exact inclusion test against the sum of a set and a cone") {
  const auto C = ConeSpec::orthant(2);
  const auto K = sum_facets(ConvexBody::singleton(make_vector({0, 0})), C);
  // B([1,1], 2r) inside B(orthant, r) needs depth r below every facet: 1 >= r
  CHECK(increase_inclusion(ConvexBody::singleton(make_vector({1, 1})), K, 3.0, 0.5, 1e-12));
  CHECK_FALSE(increase_inclusion(ConvexBody::singleton(make_vector({1, 1})), K, 3.0, 0.6, 1e-12));
  // rays leaving the orthant can never fit
  const auto ray = ConvexBody::vpolyhedron({make_vector({1, 1})}, {make_vector({-1, 0})});
  CHECK_FALSE(increase_inclusion(ray, K, 1.5, 0.1, 1e-12));
}

TEST_CASE("interiority witness for the identity fan") {
  const auto res = interiority_check({Matrix::Identity(2, 2)}, ConeSpec::orthant(2));
  CHECK(res.ok);
  CHECK(res.margin == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK_FALSE(interiority_check({Matrix::Identity(2, 2), -Matrix::Identity(2, 2)}, ConeSpec::orthant(2)).ok);
}

TEST_CASE("fan bound: eta plus one and the constructive bound") {
  const auto C = ConeSpec::orthant(2);
  const auto a = fan_increase_bound({Matrix::Identity(2, 2)}, C, 64, 1);
  REQUIRE(a.applicable);
  CHECK(a.value == doctest::Approx(2.0));
  CHECK(a.constructive_bound == doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-6));
  const auto b = fan_increase_bound({mat({{2, 0}, {0, 3}})}, C, 64, 1);
  CHECK(b.value == doctest::Approx(3.0));
  CHECK(b.constructive_bound == doctest::Approx(1.0 + 2.0 * std::sqrt(0.5)).epsilon(1e-6));
  CHECK_FALSE(fan_increase_bound({Matrix::Identity(2, 2)}, ConeSpec::from_generators(
                                      {make_vector({1, 0}), make_vector({-1, 0}), make_vector({0, 1}),
                                       make_vector({0, -1})}, 2), 64, 1)
                  .applicable);
  const auto mix = fan_increase_bound({Matrix::Identity(2, 2), mat({{2, 0}, {0, 1}})}, C, 64, 1);
  CHECK(mix.applicable);
  CHECK(mix.eta_bar == doctest::Approx(1.0));
}

TEST_CASE("constructive bound is certified on the sampled lattice for the identity fan") {
  const InclusionInstance inst("fan", SetMap::fan({Matrix::Identity(2, 2)}), ConeSpec::orthant(2), make_vector({0}),
                               make_vector({0, 0}), box1(-1, 1), Box{Vector::Constant(2, -1), Vector::Constant(2, 1)});
  IncreaseOptions opt;
  opt.witness_dir = make_vector({1, 1});
  auto slice = [&inst](const Vector& x) { return inst.evaluate(inst.pbar(), x); };
  CHECK(check_c_increase_global(slice, inst.cone(), 1.0 + std::sqrt(0.5) - 1e-9, inst.x_window(), opt).valid());
  CHECK_FALSE(check_c_increase_global(slice, inst.cone(), 2.0, inst.x_window(), opt).valid());
  CHECK(check_c_increase_uniform(inst, 1.5, 0.2, opt).valid());
  CHECK(check_c_increase_local(slice, inst.cone(), 1.5, inst.xbar(), 0.2, opt).valid());
}
