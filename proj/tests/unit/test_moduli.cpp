#include "svi/expression.hpp"
#include "svi/moduli.hpp"

#include <doctest.h>

#include <cmath>

using namespace svi;

namespace {

Box box1(double lo, double hi) { return {make_vector({lo}), make_vector({hi})}; }

InclusionInstance epigraph_instance(const char* f) {
  return InclusionInstance("t", SetMap::epigraph(Expression::parse(f)), ConeSpec::halfline(), make_vector({0}),
                           make_vector({0}), box1(-1, 1), box1(-10, 10));
}

const ModulusOptions kOpt{};

}  // namespace

TEST_CASE("union excess and hausdorff in one dimension") {
  SetUnion A{1, {ConvexBody::interval(0, 1), ConvexBody::interval(3, 4)}};
  SetUnion B{1, {ConvexBody::interval(0, 2)}};
  CHECK(excess(A, B) == doctest::Approx(2.0));
  CHECK(excess(B, A) == doctest::Approx(1.0));
  CHECK(hausdorff(A, B) == doctest::Approx(2.0));
  CHECK(excess(SetUnion{1, {}}, B) == 0.0);
  CHECK(A.dist(make_vector({2.5})) == doctest::Approx(0.5));
}

TEST_CASE("Liplsc of Solv for the cubic and shift instances is one") {
  for (const char* f : {"p^3 + x^3", "x - p"}) {
    const auto inst = epigraph_instance(f);
    const auto m = liplsc_modulus(ParamSetMap::solution_map(inst), inst.pbar(), inst.xbar(), kOpt);
    CHECK(m.value() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m.verdict() == Convergence::converged);
  }
}

TEST_CASE("Lipusc of the shift map in p is one") {
  const auto inst = epigraph_instance("x - p");
  const auto m = lipusc_modulus(ParamSetMap::map_in_p(inst.map(), inst.xbar()), inst.pbar(), kOpt);
  CHECK(m.value() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sqrt interval: Lipusc levels follow 1/sqrt(delta) and diverge") {
  const auto Phi = ParamSetMap::map_in_p(SetMap::sqrt_interval(Variable::p), make_vector({0}));
  const auto m = lipusc_modulus(Phi, make_vector({0}), kOpt);
  CHECK(m.verdict() == Convergence::diverging);
  for (const auto& l : m.est.levels) CHECK(l.value == doctest::Approx(1.0 / std::sqrt(l.scale)).epsilon(0.10));
}

TEST_CASE("halfline sign: Lipusc zero, liploc infinite") {
  const auto Phi = ParamSetMap::map_in_p(SetMap::halfline_sign(Variable::p), make_vector({0}));
  const auto u = lipusc_modulus(Phi, make_vector({0}), kOpt);
  CHECK(u.value() == 0.0);
  const auto l = liploc_modulus(Phi, make_vector({0}), kOpt);
  CHECK(l.verdict() == Convergence::diverging);
  CHECK(l.value() == kInf);
}

TEST_CASE("calmness of a singleton map picks up the slope") {
  const auto Phi = ParamSetMap::singleton([](const Vector& p) { return Vector(2.0 * p); }, 1, 1);
  const auto m = calm_modulus(Phi, make_vector({0}), make_vector({0}), 1.0, kOpt);
  CHECK(m.value() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("scalar calmness from above and below") {
  // psi(p) = 2 max(p,0) - 0.5 max(-p,0): rises with slope 2, falls with slope 0.5
  auto psi = [](const Vector& p) { return 2.0 * std::max(p[0], 0.0) - 0.5 * std::max(-p[0], 0.0); };
  const auto m = scalar_calm_moduli(psi, make_vector({0}), kOpt);
  CHECK(m.upper.value() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.lower.value() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.both.value() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("joint and parametric Lipschitz constants of the shift map") {
  const auto inst = epigraph_instance("x - p");
  // max metric on (p,x): moving p and x oppositely by delta shifts x - p by 2 delta
  CHECK(joint_lipschitz(inst, kOpt).value == doctest::Approx(2.0).epsilon(0.02));
  const auto lp = parametric_lipschitz(inst, kOpt);
  CHECK(lp.value == doctest::Approx(1.0).epsilon(0.02));
  CHECK(lp.has_flag("region_restricted"));
}

TEST_CASE("moduli reject reference points outside the value") {
  const auto inst = epigraph_instance("x - p");
  CHECK_THROWS_AS(liplsc_modulus(ParamSetMap::solution_map(inst), inst.pbar(), make_vector({-1}), kOpt), InputError);
}
