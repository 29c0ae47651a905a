#include <doctest.h>

#include <random>

#include "support/oracles.hpp"

using namespace lcx;
using oracle::pt;

TEST_SUITE("core") {

TEST_CASE("extended reals") {
  const auto inf = ExtReald::pos_inf(), ninf = ExtReald::neg_inf();
  CHECK((ExtReald(3) + inf).is_pos_inf());
  CHECK((ExtReald(-7) + ninf).is_neg_inf());
  CHECK((inf + inf).is_pos_inf());
  CHECK_THROWS_AS(inf + ninf, Error);
  CHECK_THROWS_AS(ninf + inf, Error);
  CHECK_THROWS_AS(inf - inf, Error);
  CHECK(ninf < ExtReald(-1e300));
  CHECK(ExtReald(1e300) < inf);
  CHECK(ExtReald(2) == ExtReald(2));
  CHECK_THROWS_AS(ExtReald(std::nan("")), Error);
  try {
    (void)(inf + ninf);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("grid construction") {
  const auto g = Gridd::line(-1, 1, 201);
  CHECK(g.size() == 201);
  CHECK(g.spacing(0) == doctest::Approx(0.01));
  for (Index j = 0; j < g.size(); ++j) CHECK(g.node(j)(0) == -1.0 + double(j) * g.spacing(0));
  CHECK_THROWS_AS(Gridd::line(1, 1, 5), Error);
  CHECK_THROWS_AS(Gridd::line(0, 1, 1), Error);

  const auto r = Gridd::rect(-1, 1, 3, 0, 2, 5);
  CHECK(r.size() == 15);
  CHECK(r.node(r.flat_index(2, 4)) == pt(1, 2));
  CHECK(r.multi_index(7) == std::array<Index, 2>{1, 2});
}

TEST_CASE("refinement keeps the old nodes") {
  const auto g = Gridd::line(-1, 1, 11);
  const auto fine = g.refined(3);
  CHECK(fine.size() == 81);
  for (Index j = 0; j < g.size(); ++j) {
    const auto at = fine.locate(g.node(j));
    REQUIRE(at.has_value());
    CHECK(*at == 8 * j);
  }
}

TEST_CASE("locating nodes") {
  const auto g = Gridd::line(-2, 2, 5);
  CHECK(g.require_node(pt(1)) == 3);
  CHECK_THROWS_AS(g.require_node(pt(0.5)), Error);
  try {
    g.require_node(pt(3));
    FAIL("outside point accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  try {
    g.require_node(pt(0.5));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
}

TEST_CASE("norm_dist examples") {
  const auto box = Gridd::rect(-5, 5, 11, -5, 5, 11, Norm::l1);
  CHECK(norm_dist(box, pt(0, 0), pt(1, -1)) == 2);
  CHECK(norm_dist(box.with_norm(Norm::linf), pt(0, 0), pt(1, -1)) == 1);
  CHECK(norm_dist(box.with_norm(Norm::l2), pt(0, 0), pt(3, 4)) == 5);
  CHECK_THROWS_AS(norm_dist(box, pt(0, 0), pt(6, 0)), Error);
}

TEST_CASE("norm_dist is a metric on random triples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (Norm p : {Norm::l1, Norm::l2, Norm::linf}) {
    const auto box = Gridd::rect(-3, 3, 7, -3, 3, 7, p);
    for (int t = 0; t < 1000; ++t) {
      const auto x = pt(u(rng), u(rng)), y = pt(u(rng), u(rng)), z = pt(u(rng), u(rng));
      const double xy = norm_dist(box, x, y), yz = norm_dist(box, y, z), xz = norm_dist(box, x, z);
      CHECK(xz <= (xy + yz) * (1 + 1e-12));
      CHECK(xy == norm_dist(box, y, x));
      CHECK(xy >= 0);
      CHECK(norm_dist(box, x, x) == 0);
    }
  }
}

TEST_CASE("gallery evaluation") {
  CHECK(eval(GalleryFunctiond::square(), pt(2)) == ExtReald(4));
  CHECK(eval(GalleryFunctiond::neg_sqrt_abs(), pt(0)).value() == 0);
  CHECK(eval(GalleryFunctiond::abs_diff_2d(), pt(3, -1)) == ExtReald(2));
  CHECK(eval(GalleryFunctiond::sqrt2_abs(), pt(-1)).value() == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(eval(GalleryFunctiond::square(), pt(3), Gridd::line(-1, 1, 3)), Error);
  CHECK(gallery_ids().size() == 5);
  for (const auto& id : gallery_ids()) CHECK(GalleryFunctiond::from_id(id).has_value());
  CHECK_FALSE(GalleryFunctiond::from_id("cube").has_value());
}

TEST_CASE("sample examples") {
  auto s = sample(GalleryFunctiond::square(), Gridd::line(-1, 1, 3));
  CHECK(s.values() == (VectorXd(3) << 1, 0, 1).finished());
  s = sample(GalleryFunctiond::abs_1d(), Gridd::line(-2, 2, 5));
  CHECK(s.values() == (VectorXd(5) << 2, 1, 0, 1, 2).finished());
  s = sample(GalleryFunctiond::neg_sqrt_abs(), Gridd::line(0, 1, 5));
  CHECK(s[0] == 0);
  CHECK(s[1] == -0.5);
  CHECK(s[2] == doctest::Approx(-std::sqrt(0.5)));
  CHECK(s[3] == doctest::Approx(-std::sqrt(0.75)));
  CHECK(s[4] == -1);
}

TEST_CASE("sample and eval agree bit for bit") {
  const auto g1 = Gridd::line(-1.3, 2.7, 97);
  const auto g2 = Gridd::rect(-1, 1, 23, -0.5, 2, 31, Norm::l1);
  for (const auto& id : gallery_ids()) {
    const auto f = *GalleryFunctiond::from_id(id);
    const auto& g = f.dim() == 1 ? g1 : g2;
    const auto s = sample(f, g);
    for (Index j = 0; j < g.size(); ++j) {
      CHECK(s[j] == eval(f, g.node(j)).value());
      CHECK(eval(s, g.node(j)) == s.at(j));
    }
  }
}

TEST_CASE("sampled functions") {
  const auto g = Gridd::line(0, 1, 3);
  CHECK_THROWS_AS(SampledFunctiond(g, VectorXd::Zero(4)), Error);
  const SampledFunctiond f(g, (VectorXd(3) << oracle::kInf, 2, oracle::kInf).finished());
  CHECK(f.is_proper());
  CHECK(f.effective_domain() == std::vector<Index>{1});
  CHECK_FALSE(SampledFunctiond(g, VectorXd::Constant(3, oracle::kInf)).is_proper());
  CHECK_THROWS_AS(eval(f, pt(0.3)), Error);
  const SampledFunctiond a(g, (VectorXd(3) << oracle::kInf, 0, 0).finished());
  const SampledFunctiond b(g, (VectorXd(3) << -oracle::kInf, 0, 0).finished());
  CHECK_THROWS_AS(add(a, b), Error);
}

TEST_CASE("lsc probe") {
  const auto box = Gridd::line(-1, 1, 201);
  auto r = lsc_probe(GalleryFunctiond::square(), pt(0), 6, std::optional<Gridd>(box));
  CHECK(r.verdict == LscVerdict::consistent);
  CHECK(r.liminf_estimates.size() == 6);
  for (std::size_t i = 1; i < r.liminf_estimates.size(); ++i) CHECK(r.liminf_estimates[i] <= r.liminf_estimates[i - 1]);

  r = lsc_probe(GalleryFunctiond::neg_sqrt_abs(), pt(0), 6, std::optional<Gridd>(box));
  CHECK(r.verdict == LscVerdict::consistent);

  const auto step = GalleryFunctiond::custom("step", 1, [](const Pointd& x) { return ExtReald(x(0) < 0 ? 0.0 : 1.0); });
  r = lsc_probe(step, pt(0), 6, std::optional<Gridd>(box));
  CHECK(r.verdict == LscVerdict::violated);
  for (const auto& e : r.liminf_estimates) CHECK(e.value() == 0);

  // the mirrored step is lsc at 0
  const auto up = GalleryFunctiond::custom("step_up", 1, [](const Pointd& x) { return ExtReald(x(0) <= 0 ? 0.0 : 1.0); });
  CHECK(lsc_probe(up, pt(0), 6, std::optional<Gridd>(box)).verdict == LscVerdict::consistent);
  CHECK_THROWS_AS(lsc_probe(GalleryFunctiond::square(), pt(0), 1), Error);
  CHECK_THROWS_AS(lsc_probe(GalleryFunctiond::square(), pt(2), 3, std::optional<Gridd>(box)), Error);
}

}
