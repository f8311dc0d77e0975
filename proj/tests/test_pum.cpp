#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rbfpu/pum.hpp"

using namespace rbfpu;

namespace {

CoverParams params() { return CoverParams{}; }

Cover circle_cover(double h) {
  const Pointset ps = generate_pointset(ObstacleShape::circle(), h, TransformParams{});
  return build_cover(ps, ObstacleShape::circle(), params());
}

// A random point inside the union of patches.
Point2 random_covered(const Cover& c, std::mt19937& rng) {
  std::uniform_real_distribution<double> ux(0.0, 2.0), up(0.0, kPi);
  for (;;) {
    const Point2 q{ux(rng), up(rng)};
    if (!c.covering(q).empty()) return q;
  }
}

}  // namespace

TEST_CASE("wendland") {
  CHECK(wendland_c2(0.0) == 1.0);
  CHECK(wendland_c2(1.0) == 0.0);
  CHECK(wendland_c2(1.5) == 0.0);
  CHECK(wendland_c2(0.5) == doctest::Approx(0.1875));
}

TEST_CASE("patch membership is strict") {
  Patch p{{0.0, 0.0}, 1.0, 0.5, {}};
  CHECK(p.contains({0.99, 0.0}));
  CHECK_FALSE(p.contains({1.0, 0.0}));
  CHECK_FALSE(p.contains({0.0, 0.5}));
  CHECK(p.ratio({0.0, 0.25}) == doctest::Approx(0.5));
}

TEST_CASE("single patch cover") {
  const Pointset ps = generate_pointset(ObstacleShape::circle(), 0.5, TransformParams{});
  const Cover c = make_cover(ps, {Patch{{1.0, kPi / 2}, 5.0, 5.0, {}}});
  CHECK(c.max_overlap == 1);
  for (const auto& xi : c.node_patches) CHECK(xi == std::vector<std::size_t>{0});
  const auto w = shepard_weights({1.0, kPi / 2}, c);
  REQUIRE(w.size() == 1);
  CHECK(w[0].w == 1.0);
  for (const WeightJet& j : shepard_weight_derivatives({0.3, 2.0}, c)) {
    CHECK(j.w == doctest::Approx(1.0));
    CHECK(j.d1 == doctest::Approx(0.0));
    CHECK(j.d2 == doctest::Approx(0.0));
    CHECK(j.d11 == doctest::Approx(0.0));
    CHECK(j.d22 == doctest::Approx(0.0));
    CHECK(j.d12 == doctest::Approx(0.0));
  }
}

TEST_CASE("two patches, Shepard ratio") {
  // q at distance ratios r1, r2 from two unit patches, chosen so Phi = 0.3 and 0.1
  auto invert = [](double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (wendland_c2(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double r1 = invert(0.3);
  const double r2 = invert(0.1);
  Cover c;
  c.patches = {Patch{{0.0, 0.0}, 1.0, 1.0, {}}, Patch{{r1 + r2, 0.0}, 1.0, 1.0, {}}};
  const auto w = shepard_weights({r1, 0.0}, c);
  REQUIRE(w.size() == 2);
  CHECK(w[0].w == doctest::Approx(0.75));
  CHECK(w[1].w == doctest::Approx(0.25));
  CHECK_THROWS_AS(shepard_weights({5.0, 5.0}, c), DomainError);
}

TEST_CASE("circle cover, h = 0.05") {
  const Pointset ps = generate_pointset(ObstacleShape::circle(), 0.05, TransformParams{});
  const Cover c = build_cover(ps, ObstacleShape::circle(), params());
  CHECK(c.max_overlap <= 9);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    REQUIRE_FALSE(c.node_patches[k].empty());
    for (std::size_t i : c.node_patches[k]) REQUIRE(c.patches[i].ratio(ps.nodes[k].point()) < 1.0);
  }
  for (const Patch& p : c.patches) {
    CHECK_FALSE(p.members.empty());
    for (std::size_t m : p.members) REQUIRE(p.contains(ps.nodes[m].point()));
  }
}

TEST_CASE("uncovered node is reported") {
  const Pointset ps = generate_pointset(ObstacleShape::circle(), 0.5, TransformParams{});
  CHECK_THROWS(make_cover(ps, {Patch{{0.0, 0.0}, 0.3, 0.3, {}}}));
}

TEST_CASE("square cover balances patch sizes") {
  const Pointset ps = generate_pointset(ObstacleShape::square(), 0.1, TransformParams{});
  const Cover c = build_cover(ps, ObstacleShape::square(), params());
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const Patch& p : c.patches) {
    lo = std::min(lo, p.members.size());
    hi = std::max(hi, p.members.size());
  }
  CHECK(hi <= 3 * lo);
}

TEST_CASE("partition of unity at random points") {
  for (double h : {0.1, 0.05}) {
    const Cover c = circle_cover(h);
    std::mt19937 rng(7);
    double sum_err = 0.0, d_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Point2 q = random_covered(c, rng);
      double s = 0.0, s1 = 0.0, s2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
      for (const WeightJet& j : shepard_weight_derivatives(q, c)) {
        s += j.w;
        s1 += j.d1;
        s2 += j.d2;
        s11 += j.d11;
        s22 += j.d22;
        s12 += j.d12;
      }
      sum_err = std::max(sum_err, std::abs(s - 1.0));
      d_err = std::max({d_err, std::abs(s1), std::abs(s2), std::abs(s11), std::abs(s22), std::abs(s12)});
    }
    CHECK(sum_err < 1e-13);
    CHECK(d_err < 1e-10);
  }
}

TEST_CASE("weight derivatives against central differences") {
  const Cover c = circle_cover(0.1);
  std::mt19937 rng(11);
  const double d = 1e-6;
  auto weight = [&](Point2 q, std::size_t patch) {
    for (const WeightValue& v : shepard_weights(q, c)) {
      if (v.patch == patch) return v.w;
    }
    return 0.0;
  };
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Point2 q = random_covered(c, rng);
    for (const WeightJet& j : shepard_weight_derivatives(q, c)) {
      const auto w = [&](double dx, double dy) { return weight({q.x + dx, q.y + dy}, j.patch); };
      const double fd1 = (w(d, 0) - w(-d, 0)) / (2 * d);
      const double fd2 = (w(0, d) - w(0, -d)) / (2 * d);
      // second derivatives from differences of the analytic first derivatives
      auto jet = [&](double dx, double dy) {
        for (const WeightJet& o : shepard_weight_derivatives({q.x + dx, q.y + dy}, c)) {
          if (o.patch == j.patch) return o;
        }
        return WeightJet{j.patch, 0, 0, 0, 0, 0, 0};
      };
      const double fd11 = (jet(d, 0).d1 - jet(-d, 0).d1) / (2 * d);
      const double fd22 = (jet(0, d).d2 - jet(0, -d).d2) / (2 * d);
      const double fd12 = (jet(0, d).d1 - jet(0, -d).d1) / (2 * d);
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
      worst = std::max({worst, rel(fd1, j.d1), rel(fd2, j.d2), rel(fd11, j.d11), rel(fd22, j.d22), rel(fd12, j.d12)});
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("compact support") {
  const Cover c = circle_cover(0.1);
  std::mt19937 rng(3);
  for (int t = 0; t < 200; ++t) {
    const Point2 q = random_covered(c, rng);
    const auto cov = c.covering(q);
    for (const WeightValue& v : shepard_weights(q, c)) {
      CHECK(std::find(cov.begin(), cov.end(), v.patch) != cov.end());
    }
  }
}
