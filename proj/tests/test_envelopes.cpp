#include <doctest.h>

#include "support/oracles.hpp"

using namespace lcx;
using oracle::kInf;
using oracle::pt;

namespace {

SampledFunctiond sampled(const char* id, const Gridd& g) { return sample(*GalleryFunctiond::from_id(id), g); }

}  // namespace

TEST_SUITE("envelopes") {

TEST_CASE("cone minorants") {
  const auto g = Gridd::line(-1, 1, 201);
  const auto a = sampled("abs_1d", g);
  const auto c = cone_minorant(a, 100, 1.0);
  const VectorXd v = sample(c, g);
  CHECK(max_excess(v, a) <= 0);
  CHECK(v(100) == a[100]);

  const auto sq = sampled("square", g);
  const VectorXd w = sample(cone_minorant(sq, 200, 2.0), g);
  for (Index j = 0; j < g.size(); ++j) {
    const double x = g.coordinate(0, j);
    CHECK(w(j) == doctest::Approx(1 - 2 * std::abs(x - 1)));
    CHECK(w(j) <= sq[j] + 1e-15);
  }
  // slope 1 at the same apex is not below x^2 on (0, 1)
  const VectorXd u = sample(cone_minorant(sq, 200, 1.0), g);
  Index where = -1;
  CHECK(max_excess(u, sq, &where) > 0);
  CHECK(g.coordinate(0, where) > 0);
  CHECK(g.coordinate(0, where) < 1);

  CHECK_THROWS_AS(cone_minorant(sq, 3, -1.0), Error);
  const SampledFunctiond hole(Gridd::line(0, 1, 3), (VectorXd(3) << 0, kInf, 0).finished());
  CHECK_THROWS_AS(cone_minorant(hole, 1, 1.0), Error);
}

TEST_CASE("upper envelope examples") {
  const auto g = Gridd::line(-2, 2, 401);
  const auto a = sampled("abs_1d", g);
  const auto e1 = lipschitz_upper_envelope(a, 1.0);
  CHECK(e1.values() == a.values());
  CHECK((e1.values() - oracle::upper_envelope(a, 1.0)).cwiseAbs().maxCoeff() == 0);

  const auto e05 = lipschitz_upper_envelope(a, 0.5);
  CHECK(e05[400] == 2);
  CHECK((e05.values() - oracle::upper_envelope(a, 0.5)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(lipschitz_modulus(e05).value() <= 0.5 + 1e-12);

  const SampledFunctiond three(g, VectorXd::Constant(g.size(), 3.0));
  for (double k : {0.0, 0.3, 7.0}) CHECK(lipschitz_upper_envelope(three, k).values() == three.values());

  CHECK_THROWS_AS(lipschitz_upper_envelope(SampledFunctiond(g, VectorXd::Constant(g.size(), kInf)), 1.0), Error);
}

TEST_CASE("upper envelope skips +inf nodes") {
  const auto g = Gridd::line(0, 4, 5);
  const SampledFunctiond f(g, (VectorXd(5) << 0, kInf, 1, kInf, 0).finished());
  const auto e = lipschitz_upper_envelope(f, 1.0);
  CHECK(e.values() == (VectorXd(5) << 0, 0, 1, 0, 0).finished());
}

TEST_CASE("lower envelope examples") {
  const auto g = Gridd::line(-1, 1, 201);
  const auto sq = sampled("square", g);
  const auto e = lipschitz_lower_envelope(sq, 2.0);
  CHECK(e[100] == 0);
  CHECK((e.values() - oracle::lower_envelope(sq, 2.0)).cwiseAbs().maxCoeff() <= 1e-12);

  VectorXd spike = VectorXd::Constant(g.size(), kInf);
  spike(100) = 0;
  const auto v = lipschitz_lower_envelope(SampledFunctiond(g, spike), 1.0);
  for (Index j = 0; j < g.size(); ++j) CHECK(v[j] == doctest::Approx(std::abs(g.coordinate(0, j))).epsilon(1e-14));

  const auto a = sampled("abs_1d", g);
  CHECK(lipschitz_lower_envelope(a, 1.0).values() == a.values());

  VectorXd neg = sq.values();
  neg(4) = -kInf;
  CHECK_THROWS_AS(lipschitz_lower_envelope(SampledFunctiond(g, neg), 1.0), Error);
  CHECK_THROWS_AS(lipschitz_lower_envelope(sq, -1.0), Error);
}

TEST_CASE("Lipschitz modulus") {
  CHECK(lipschitz_modulus(sampled("abs_1d", Gridd::line(-3, 1, 77))).value() == doctest::Approx(1));
  const auto sq = sampled("square", Gridd::line(-1, 1, 201));
  CHECK(lipschitz_modulus(sq).value() == doctest::Approx(1.99).epsilon(1e-12));
  CHECK(lipschitz_modulus(sq).value() == doctest::Approx(oracle::modulus(sq)).epsilon(1e-14));
  CHECK(lipschitz_modulus(sampled("neg_sqrt_abs", Gridd::line(-1, 1, 201))).value() ==
        doctest::Approx(10).epsilon(1e-12));
  const auto g = Gridd::line(0, 1, 4);
  CHECK(lipschitz_modulus(SampledFunctiond(g, (VectorXd(4) << kInf, 5, kInf, kInf).finished())).value() == 0);
  const auto d2 = sampled("abs_diff_2d", Gridd::rect(-1, 1, 11, -1, 1, 11, Norm::l1));
  CHECK(lipschitz_modulus(d2).value() == doctest::Approx(oracle::modulus(d2)));
}

TEST_CASE("LC-convexity evidence") {
  const auto g = Gridd::line(-1, 1, 201);
  std::vector<double> ks;
  for (int i = 0; i <= 12; ++i) ks.push_back(std::ldexp(1.0, i));

  auto r = lc_convexity_test(GalleryFunctiond::square(), g, ks);
  REQUIRE(r.witness_k.has_value());
  CHECK(*r.witness_k == 1.0);
  CHECK(r.lc_convex);

  r = lc_convexity_test(GalleryFunctiond::neg_sqrt_abs(), g, ks);
  REQUIRE(r.witness_k.has_value());
  CHECK(r.lc_convex);
  CHECK(r.verdict() == "LC-convex (grid evidence)");
  // -|x| - 1 lies below f, so the witness is at least that high
  for (Index j = 0; j < g.size(); ++j) CHECK((*r.witness)[j] >= -std::abs(g.coordinate(0, j)) - 1);

  const auto neg_sq = GalleryFunctiond::custom("neg_square", 1, [](const Pointd& x) { return ExtReald(-x(0) * x(0)); });
  r = lc_convexity_test(neg_sq, Gridd::line(-10, 10, 201), ks);
  CHECK(r.witness_k.has_value());
  CHECK(r.boundary_attained);

  CHECK_THROWS_AS(lc_convexity_test(GalleryFunctiond::square(), g, std::vector<double>{}), Error);
  CHECK_THROWS_AS(lc_convexity_test(GalleryFunctiond::square(), g, std::vector<double>{2, 1}), Error);
}

TEST_CASE("Legendre-Fenchel transform") {
  const auto g = Gridd::line(-4, 4, 1601);
  const auto slopes = Gridd::line(-2, 2, 81);
  const auto conj = legendre_fenchel(sampled("square", g), slopes);
  const double h = g.spacing(0);
  for (Index i = 0; i < slopes.size(); ++i) {
    const double s = slopes.coordinate(0, i);
    CHECK(std::abs(conj.conjugate[i] - s * s / 4) <= h * std::abs(s) / 2 + h * h / 4 + 1e-12);
    CHECK(conj.conjugate[i] == oracle::conjugate(sampled("square", g), s));
  }
  CHECK_FALSE(conj.any_boundary());

  const auto ab = legendre_fenchel(sampled("abs_1d", Gridd::line(-2, 2, 401)), Gridd::line(-1, 1, 21));
  CHECK(ab.conjugate.values().cwiseAbs().maxCoeff() <= 1e-12);

  // beyond |s| = 1 the sup runs into the box edge
  const auto out = legendre_fenchel(sampled("abs_1d", Gridd::line(-2, 2, 401)), Gridd::line(1.5, 2, 3));
  CHECK(out.any_boundary());

  const auto aff = sample(GalleryFunctiond::affine(3, 1), Gridd::line(-1, 1, 201));
  const auto at3 = legendre_fenchel(aff, Gridd::line(3, 4, 2));
  CHECK(at3.conjugate[0] == doctest::Approx(-1));
  CHECK(at3.boundary_attained[1]);

  CHECK_THROWS_AS(legendre_fenchel(SampledFunctiond(g, VectorXd::Constant(g.size(), kInf)), slopes), Error);
  CHECK_THROWS_AS(legendre_fenchel(sampled("abs_diff_2d", Gridd::rect(-1, 1, 3, -1, 1, 3)), slopes), Error);
}

TEST_CASE("affine maximal minorants") {
  const auto g = Gridd::line(-2, 2, 401);
  const auto sq = sampled("square", g);
  auto m = affine_maximal_minorant(sq, 2.0);
  for (Index j = 0; j < g.size(); ++j) CHECK(m.values(j) == doctest::Approx(2 * g.coordinate(0, j) - 1).epsilon(1e-12));
  CHECK(touching_nodes(m.values, sq, 1e-12) == std::vector<Index>{300});

  m = affine_maximal_minorant(sq, 0.0);
  CHECK(m.values.cwiseAbs().maxCoeff() == 0);
  CHECK(touching_nodes(m.values, sq, 0.0) == std::vector<Index>{200});

  const auto ab = sampled("abs_1d", g);
  m = affine_maximal_minorant(ab, 1.0);
  const auto touch = touching_nodes(m.values, ab, 1e-12);
  CHECK(touch.size() == 201);
  CHECK(touch.front() == 200);

  CHECK_THROWS_AS(affine_maximal_minorant(sampled("neg_sqrt_abs", g), 0.0), Error);
}

TEST_CASE("family hulls") {
  const auto g = Gridd::line(-2, 2, 9);
  const auto ab = sampled("abs_1d", g);
  auto hull = family_hull(ab, ElementaryFamily<double>{ConeFamily<double>{1.0}});
  REQUIRE(hull.has_value());
  CHECK(hull->values() == ab.values());

  const auto sq = sampled("square", Gridd::line(-1, 1, 21));
  hull = family_hull(sq, ElementaryFamily<double>{ConeFamily<double>{0.0}});
  REQUIRE(hull.has_value());
  CHECK(hull->values().cwiseAbs().maxCoeff() == 0);

  // affine family with slopes {-1, 1} recovers |x|
  AffineFamily<double> lines{{pt(-1), pt(1)}};
  hull = family_hull(ab, ElementaryFamily<double>{lines});
  REQUIRE(hull.has_value());
  CHECK((hull->values() - ab.values()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(is_member(ElementaryFamily<double>{lines}, g, member_values(ElementaryFamily<double>{lines}, g, 1, 0.5), 0.0));

  CHECK_FALSE(family_hull(ab, ElementaryFamily<double>{AffineFamily<double>{}}).has_value());

  VectorXd v = ab.values();
  v(3) = -kInf;
  CHECK_THROWS_AS(family_hull(SampledFunctiond(g, v), ElementaryFamily<double>{ConeFamily<double>{1.0}}), Error);
}

}
