#include <doctest.h>

#include "support/oracles.hpp"

using namespace lcx;
using oracle::pt;

namespace {

SampledFunctiond sampled(const char* id, const Gridd& g) { return sample(*GalleryFunctiond::from_id(id), g); }

}  // namespace

TEST_SUITE("extremum") {

TEST_CASE("global minimum") {
  const auto g = Gridd::line(-1, 1, 201);
  const auto sq = sampled("square", g);
  auto c = global_min_certificate(sq, 100);
  CHECK(c.holds);
  CHECK(c.consistent);
  REQUIRE(c.witness.has_value());
  CHECK(std::get<SubgradientCandidated::Affine>(c.witness->form).slope(0) == 0);

  c = global_min_certificate(sq, 200);
  CHECK_FALSE(c.holds);
  CHECK(c.consistent);
  REQUIRE(c.violating_node.has_value());
  CHECK(*c.violating_node == 100);

  const auto g2 = Gridd::rect(-1, 1, 21, -1, 1, 21, Norm::l1);
  c = global_min_certificate(sampled("abs_diff_2d", g2), g2.require_node(pt(0, 0)));
  CHECK_FALSE(c.holds);
  CHECK(c.consistent);
  CHECK(c.worst_slack == doctest::Approx(-1));

  c = global_min_certificate(sq, 100, true);
  REQUIRE(c.zero_maximality.has_value());
  CHECK(*c.zero_maximality == MaximalityStatus::maximal);
}

TEST_CASE("global maximum") {
  const auto g = Gridd::line(-1, 1, 201);
  auto c = global_max_certificate(negate(sampled("square", g)), 100);
  CHECK(c.holds);
  CHECK(c.kind == ExtremumKind::global_max_iff);
  REQUIRE(c.witness.has_value());
  CHECK(c.witness->orientation == Orientation::upper);

  const auto g2 = Gridd::line(-2, 2, 401);
  c = global_max_certificate(sampled("abs_1d", g2), 400);
  CHECK(c.holds);
  CHECK(c.boundary);

  c = global_max_certificate(sampled("square", g), 100);
  CHECK_FALSE(c.holds);
  CHECK(c.consistent);
  CHECK_THROWS_AS(global_max_certificate(sampled("square", g), 900), Error);
}

TEST_CASE("necessary condition at a maximum") {
  const auto g = Gridd::line(-1, 1, 201);
  const auto f = negate(sampled("square", g));
  const auto env = lipschitz_lower_envelope(f, 2.0);
  CHECK(env[100] == f[100]);
  GridMinorantd e{g, env.values(), 2.0};
  GridMinorantd cone{g, VectorXd(g.size()), 2.0};
  for (Index j = 0; j < g.size(); ++j) cone.values(j) = -2 * std::abs(g.coordinate(0, j));

  auto c = max_necessary_condition(f, 100, {e, cone});
  CHECK(c.hypothesis_met);
  CHECK(c.holds);
  REQUIRE(c.intervals.size() == 2);
  CHECK(c.intervals[0].contains_zero(0.0));
  CHECK(c.intervals[1].right == doctest::Approx(-2));
  CHECK(c.intervals[1].left == doctest::Approx(2));

  const auto sq = sampled("square", g);
  GridMinorantd zero{g, VectorXd::Zero(g.size()), 0.0};
  c = max_necessary_condition(sq, 100, {zero});
  CHECK_FALSE(c.hypothesis_met);
  CHECK(c.status() == "hypothesis not met");

  GridMinorantd off{g, VectorXd::Constant(g.size(), -0.5), 0.0};
  CHECK_THROWS_AS(max_necessary_condition(f, 100, {off}), Error);
}

TEST_CASE("boundary intervals are one-sided") {
  const VectorXd h = (VectorXd(3) << 0, 1, 1.5).finished();
  auto s = difference_interval(h, Index(0), 1.0);
  CHECK(s.one_sided);
  CHECK(s.left == oracle::kInf);
  CHECK(s.right == 1);
  s = difference_interval(h, Index(2), 1.0);
  CHECK(s.right == -oracle::kInf);
  CHECK(s.left == 0.5);
}

TEST_CASE("scaling rule") {
  const auto g = Gridd::line(-2, 2, 401);
  const auto sq = sampled("square", g);
  const auto a2 = SubgradientCandidated::affine(pt(1), 1.0, pt(2));
  auto r = calculus_scaling_check(sq, 300, 3.0, a2);
  CHECK(r.ok);
  CHECK(std::get<SubgradientCandidated::Affine>(scale(a2, 3.0).form).slope(0) == 6);

  // negated supergradient of -f is a subgradient of f
  r = calculus_scaling_check(negate(sq), 300, -1.0, negate(a2));
  CHECK(r.ok);

  const auto ab = sampled("abs_1d", g);
  r = calculus_scaling_check(ab, 200, 2.0, SubgradientCandidated::cone(pt(0), 0.0, 1.0));
  CHECK(r.ok);
  CHECK_THROWS_AS(calculus_scaling_check(ab, 200, 0.0, SubgradientCandidated::cone(pt(0), 0.0, 1.0)), Error);
  CHECK_THROWS_AS(calculus_scaling_check(sq, 300, 1.0, SubgradientCandidated::affine(pt(1), 1.0, pt(5))), Error);
}

TEST_CASE("sum rule") {
  const auto g = Gridd::line(-2, 2, 401);
  const auto sq = sampled("square", g);
  const auto a2 = SubgradientCandidated::affine(pt(1), 1.0, pt(2));
  CHECK(calculus_sum_check(sq, sq, 300, a2, a2).ok);
  CHECK(std::get<SubgradientCandidated::Affine>(sum(a2, a2, g).form).slope(0) == 4);

  const auto ab = sampled("abs_1d", g);
  CHECK(calculus_sum_check(sq, ab, 200, SubgradientCandidated::affine(pt(0), 0.0, pt(0)),
                           SubgradientCandidated::cone(pt(0), 0.0, 1.0))
            .ok);

  VectorXd v = ab.values();
  v(0) = oracle::kInf;
  const SampledFunctiond holes(g, v);
  CHECK(calculus_sum_check(sq, holes, 200, SubgradientCandidated::affine(pt(0), 0.0, pt(0)),
                           SubgradientCandidated::cone(pt(0), 0.0, 1.0))
            .ok);
}

TEST_CASE("domination rule") {
  const auto g = Gridd::line(-1, 1, 81);
  const auto f1 = negate(sampled("abs_1d", g));
  const auto f2 = negate(sampled("square", g));
  const auto r = calculus_domination_check(f1, f2, 40, SubgradientCandidated::cone(pt(0), 0.0, 1.0));
  CHECK(r.holds);
  CHECK(r.valid);
  CHECK(r.domination_slack >= -1e-9);
  CHECK(r.pin_gap <= 1e-9);

  const auto g2 = Gridd::line(-2, 2, 81);
  const auto sq = sampled("square", g2);
  const auto a2 = SubgradientCandidated::affine(pt(1), 1.0, pt(2));
  const auto same = calculus_domination_check(sq, sq, 60, a2);
  CHECK(same.holds);
  CHECK((same.minorant.values - a2.support(g2)).cwiseAbs().maxCoeff() <= 1e-9);

  const auto shifted = SampledFunctiond(g, (f2.values().array() + 1).matrix());
  try {
    calculus_domination_check(f1, shifted, 40, SubgradientCandidated::cone(pt(0), 0.0, 1.0));
    FAIL("mismatched values accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}

}
