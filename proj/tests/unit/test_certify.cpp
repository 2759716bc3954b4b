#include "svi/certify.hpp"
#include "svi/expression.hpp"

#include <doctest.h>

#include <algorithm>

using namespace svi;

namespace {

Box box1(double lo, double hi) { return {make_vector({lo}), make_vector({hi})}; }

InclusionInstance instance(const char* id, SetMap F, ConeSpec C = ConeSpec::halfline(), int xd = 1) {
  return InclusionInstance(id, std::move(F), std::move(C), make_vector({0}), Vector::Zero(xd), box1(-1, 1),
                           Box{Vector::Constant(xd, -10), Vector::Constant(xd, 10)});
}

InclusionInstance epigraph_instance(const char* f) { return instance("t", SetMap::epigraph(Expression::parse(f))); }

Objective objective(const char* e) { return Objective::from_expression(Expression::parse(e)); }

const HypothesisCheck* find(const CertificationReport& r, const std::string& id) {
  auto it = std::find_if(r.hypotheses.begin(), r.hypotheses.end(), [&](const auto& h) { return h.id == id; });
  return it == r.hypotheses.end() ? nullptr : &*it;
}

}  // namespace

TEST_CASE("verdict rules") {
  CertificationReport r;
  r.empirical.value = 1.05;
  r.bound = 1.0;
  decide(r, 0.10);
  CHECK(r.verdict == Verdict::consistent);
  r.empirical.value = 1.2;
  decide(r, 0.10);
  CHECK(r.verdict == Verdict::violated);
  CHECK(*r.margin == doctest::Approx(-0.2));
  r.bound_kind = BoundKind::lower;
  decide(r, 0.10);
  CHECK(r.verdict == Verdict::consistent);
  r.hypotheses.push_back({"h", "", HypStatus::failed, ""});
  decide(r, 0.10);
  CHECK(r.verdict == Verdict::vacuous);
  r.hypotheses.clear();
  r.bound.reset();
  decide(r, 0.10);
  CHECK(r.verdict == Verdict::not_evaluable);
}

TEST_CASE("cubic: zero partial slope makes the Liplsc claim vacuous") {
  const auto r = certify_liplsc(epigraph_instance("p^3 + x^3"));
  CHECK(r.theorem == "3.1");
  CHECK(r.verdict == Verdict::vacuous);
  CHECK(r.empirical.value == doctest::Approx(1.0).epsilon(0.02));
  REQUIRE(find(r, "3.1-iv"));
  CHECK(find(r, "3.1-iv")->status == HypStatus::failed);
}

TEST_CASE("shift: all stability claims consistent") {
  const auto inst = epigraph_instance("x - p");
  const auto a = certify_liplsc(inst);
  CHECK(a.verdict == Verdict::consistent);
  CHECK(*a.bound == doctest::Approx(1.0).epsilon(0.05));
  CHECK(a.empirical.value == doctest::Approx(1.0).epsilon(0.02));
  CHECK(certify_calm(inst).verdict == Verdict::consistent);
  CHECK(certify_lipusc(inst).verdict == Verdict::consistent);
  for (const auto& r : certify_val(inst, objective("x"))) {
    CHECK(r.verdict == Verdict::consistent);
    if (r.theorem == "4.3") {
      CHECK(*r.bound == doctest::Approx(1.0).epsilon(0.05));
      CHECK(r.empirical.value == doctest::Approx(1.0).epsilon(0.02));
    }
  }
}

TEST_CASE("bound override drives a violated verdict") {
  CertifyOptions opt;
  opt.bound_override = 0.5;
  const auto r = certify_liplsc(epigraph_instance("x - p"), opt);
  CHECK(r.verdict == Verdict::violated);
  CHECK(r.hypotheses_supported());
}

TEST_CASE("concavity status") {
  Matrix two(1, 1);
  two << 2;
  CHECK(concavity_hypothesis(instance("f", SetMap::fan({two})), "c").status == HypStatus::verified);
  CHECK(concavity_hypothesis(epigraph_instance("x - p"), "c").status == HypStatus::failed);
  auto flagged = SetMap::epigraph(Expression::parse("x - p"));
  flagged.traits.concave_in_x = true;
  CHECK(concavity_hypothesis(instance("e", flagged), "c").status == HypStatus::window_verified);
}

TEST_CASE("one-dimensional fan: slope bounds from the increase constant") {
  Matrix two(1, 1);
  two << 2;
  const auto reps = certify_increase_slope(instance("fan", SetMap::fan({two})));
  REQUIRE(reps.size() == 4);
  for (const auto& r : reps) {
    CHECK(r.bound_kind == BoundKind::lower);
    REQUIRE(r.bound);
    CHECK(*r.bound == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.empirical.value == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(r.verdict == Verdict::consistent);
  }
}

TEST_CASE("constant map: no increase constant, nothing to evaluate") {
  const auto reps = certify_increase_slope(instance("c", SetMap::constant(ConvexBody::interval(1.0, kInf))));
  for (const auto& r : reps) {
    CHECK_FALSE(r.bound.has_value());
    CHECK(r.verdict != Verdict::violated);
  }
}

TEST_CASE("two-dimensional decisions leave Solv moduli unevaluated") {
  const auto r = certify_liplsc(instance("fan2", SetMap::fan({Matrix::Identity(2, 2)}), ConeSpec::orthant(2), 2));
  CHECK(r.verdict != Verdict::violated);
  CHECK(std::isnan(r.empirical.value));
}
