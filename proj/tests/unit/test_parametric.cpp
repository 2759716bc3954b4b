#include "svi/expression.hpp"
#include "svi/parametric.hpp"

#include <doctest.h>

#include <cmath>

using namespace svi;

namespace {

Box box1(double lo, double hi) { return {make_vector({lo}), make_vector({hi})}; }

InclusionInstance epigraph_instance(const char* f) {
  return InclusionInstance("t", SetMap::epigraph(Expression::parse(f)), ConeSpec::halfline(), make_vector({0}),
                           make_vector({0}), box1(-1, 1), box1(-10, 10));
}

Objective objective(const char* e) { return Objective::from_expression(Expression::parse(e)); }

}  // namespace

TEST_CASE("val of the shift instance with theta = x is p") {
  const auto inst = epigraph_instance("x - p");
  for (double p : {-0.8, -0.25, 0.0, 0.4, 1.0}) {
    const auto v = value_at(inst, objective("x"), make_vector({p}));
    CHECK(v.status == ValueStatus::attained);
    CHECK(v.val == doctest::Approx(p).epsilon(1e-7));
    REQUIRE(v.argmin.size() == 1);
    CHECK(v.argmin[0][0] == doctest::Approx(p).epsilon(1e-6));
  }
}

TEST_CASE("interior minimizer found by golden section") {
  const auto inst = epigraph_instance("x - p");
  // (x-3)^2 over [p, 10]: minimum 0 at x = 3
  const auto v = value_at(inst, objective("(x - 3)^2"), make_vector({0}));
  CHECK(v.val == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(v.argmin.front()[0] == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("decreasing objective on a clipped piece is unbounded below") {
  const auto inst = epigraph_instance("x - p");
  const auto v = value_at(inst, objective("-x"), make_vector({0}));
  CHECK(v.status == ValueStatus::unbounded_below);
  CHECK(v.val == -kInf);
}

TEST_CASE("empty slice is infeasible with val +inf") {
  const auto inst = InclusionInstance("e", SetMap::epigraph(Expression::parse("p - 1 + 0 * x")), ConeSpec::halfline(),
                                      make_vector({1}), make_vector({0}), box1(-1, 1), box1(-1, 1));
  const auto v = value_at(inst, objective("x"), make_vector({0}));
  CHECK(v.status == ValueStatus::infeasible);
  CHECK(v.val == kInf);
}

TEST_CASE("value profile keeps the input order") {
  const auto inst = epigraph_instance("x - p");
  const auto prof = value_profile(inst, objective("x"), {make_vector({0.5}), make_vector({-0.5})});
  REQUIRE(prof.size() == 2);
  CHECK(prof[0].result.val == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(prof[1].result.val == doctest::Approx(-0.5).epsilon(1e-7));
}

TEST_CASE("calmness report of the shift instance") {
  const auto inst = epigraph_instance("x - p");
  const auto rep = val_calmness_report(inst, objective("x"));
  CHECK(rep.empirical.both.value() == doctest::Approx(1.0).epsilon(0.02));
  REQUIRE(rep.calm_bound.value);
  CHECK(*rep.calm_bound.value == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(rep.ucalm_bound.value);
  CHECK(*rep.ucalm_bound.value == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("calmness report requires xbar to be a minimizer") {
  const auto inst = epigraph_instance("x - p");
  CHECK_THROWS_AS(val_calmness_report(inst, objective("-x")), InputError);
}

TEST_CASE("objective moduli on closed forms") {
  const auto theta = objective("2*x - p");
  const auto u = objective_upper_calmness(theta, make_vector({0}), make_vector({0}), ModulusOptions{});
  CHECK(u.value == doctest::Approx(3.0).epsilon(1e-6));
  const auto l = objective_lipschitz(theta, box1(-1, 1), box1(-1, 1), 7, Tolerances{});
  CHECK(l.value <= 3.0 + 1e-9);
  CHECK(l.value == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("ratio bound reads the slope through the positivity threshold") {
  std::string why;
  CHECK(*ratio_bound(2.0, 3.0, 1.5, 0.05, &why) == doctest::Approx(4.0));
  CHECK(*ratio_bound(2.0, 1.0, 4.0, 0.05, &why) == doctest::Approx(2.0));
  CHECK(*ratio_bound(2.0, 1.0, kInf, 0.05, &why) == doctest::Approx(2.0));
  CHECK_FALSE(ratio_bound(2.0, 1.0, 0.01, 0.05, &why).has_value());
  CHECK_FALSE(why.empty());
  CHECK_FALSE(ratio_bound(kInf, 1.0, 1.0, 0.05, &why).has_value());
}
