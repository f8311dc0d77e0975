#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rbfpu/rbf.hpp"

using namespace rbfpu;

namespace {

struct Grid {
  Pointset ps;
  Cover cover;
  PuInterpolator interp;

  explicit Grid(double h)
      : ps(generate_pointset(ObstacleShape::circle(), h, TransformParams{})),
        cover(build_cover(ps, ObstacleShape::circle(), CoverParams{})),
        interp(ps, cover, KernelParams{}) {}
};

double max_dphi_error(const Grid& g) {
  const DiffOperators ops = g.interp.assemble();
  Eigen::VectorXd f(g.ps.size());
  for (std::size_t k = 0; k < g.ps.size(); ++k) f(static_cast<Eigen::Index>(k)) = std::sin(g.ps.nodes[k].phi);
  const Eigen::VectorXd df = ops.dphi * f;
  double worst = 0.0;
  for (std::size_t k = 0; k < g.ps.n_interior; ++k) {
    worst = std::max(worst, std::abs(df(static_cast<Eigen::Index>(k)) - std::cos(g.ps.nodes[k].phi)));
  }
  return worst;
}

}  // namespace

TEST_CASE("imq kernel") {
  const KernelParams k{2.0};
  CHECK(imq(0.0, k) == 1.0);
  CHECK(imq(1.0, k) == doctest::Approx(1.0 / std::sqrt(5.0)));

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double d = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const Point2 q{u(rng), u(rng)}, c{u(rng), u(rng)};
    const Jet j = imq_partials(q, c, k);
    auto f = [&](double dx, double dy) { return imq_partials({q.x + dx, q.y + dy}, c, k); };
    CHECK(j.value == doctest::Approx(imq(std::hypot(q.x - c.x, q.y - c.y), k)));
    CHECK(j.d1 == doctest::Approx((f(d, 0).value - f(-d, 0).value) / (2 * d)).epsilon(1e-6));
    CHECK(j.d2 == doctest::Approx((f(0, d).value - f(0, -d).value) / (2 * d)).epsilon(1e-6));
    CHECK(j.d11 == doctest::Approx((f(d, 0).d1 - f(-d, 0).d1) / (2 * d)).epsilon(1e-6));
    CHECK(j.d22 == doctest::Approx((f(0, d).d2 - f(0, -d).d2) / (2 * d)).epsilon(1e-6));
    CHECK(j.d12 == doctest::Approx((f(0, d).d1 - f(0, -d).d1) / (2 * d)).epsilon(1e-6));
  }
}

TEST_CASE("local interpolant") {
  SUBCASE("one node") {
    const LocalInterpolant li({{0.3, 0.4}}, KernelParams{});
    CHECK(li.gram()(0, 0) == 1.0);
    CHECK(li.cardinal({0.3, 0.4})(0) == doctest::Approx(1.0));
    CHECK(li.cardinal({0.8, 0.4})(0) == doctest::Approx(imq(0.5, KernelParams{})));
  }
  SUBCASE("three collinear nodes are positive definite") {
    const LocalInterpolant li({{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}}, KernelParams{});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(li.gram());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK_FALSE(li.used_fallback());
  }
}

TEST_CASE("cardinal property, h = 0.1") {
  const Grid g(0.1);
  CHECK(g.interp.max_cardinal_defect() < 1e-8);

  const DiffOperators ops = g.interp.assemble();
  const Eigen::MatrixXd id = Eigen::MatrixXd(ops.id);
  CHECK((id - Eigen::MatrixXd::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("operators share one pattern") {
  const Grid g(0.2);
  const DiffOperators ops = g.interp.assemble();
  for (Operator op : kAllOperators) {
    const SparseMatrix& m = ops.get(op);
    CHECK(m.nonZeros() == ops.dxi.nonZeros());
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      REQUIRE(m.outerIndexPtr()[r + 1] == ops.dxi.outerIndexPtr()[r + 1]);
    }
  }
  // a row only touches nodes sharing a patch with it
  for (Eigen::Index r = 0; r < ops.dxi.rows(); ++r) {
    const auto& mine = g.cover.node_patches[static_cast<std::size_t>(r)];
    for (SparseMatrix::InnerIterator it(ops.dxi, r); it; ++it) {
      const auto& theirs = g.cover.node_patches[static_cast<std::size_t>(it.col())];
      bool shared = false;
      for (std::size_t p : mine) shared = shared || std::find(theirs.begin(), theirs.end(), p) != theirs.end();
      REQUIRE(shared);
    }
  }
}

TEST_CASE("d/dphi of sin(phi) converges") {
  const double e2 = max_dphi_error(Grid(0.2));
  const double e1 = max_dphi_error(Grid(0.1));
  CHECK(e1 <= e2 / 2);
}

TEST_CASE("restrict_rows") {
  const Grid g(0.2);
  const DiffOperators ops = g.interp.assemble();
  const std::vector<std::size_t> three{3};
  const Eigen::MatrixXd r = Eigen::MatrixXd(restrict_rows(ops.id, three));
  CHECK(r.rows() == 1);
  CHECK(r(0, 3) == doctest::Approx(1.0));
  CHECK(r.row(0).cwiseAbs().sum() == doctest::Approx(1.0));

  std::vector<std::size_t> all(g.ps.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  CHECK(Eigen::MatrixXd(restrict_rows(ops.dphi, all)).isApprox(Eigen::MatrixXd(ops.dphi)));
  CHECK(restrict_rows(ops.dphi, g.ps.indices(NodeTag::Axis)).rows() == static_cast<Eigen::Index>(g.ps.n_axis));
}

TEST_CASE("point evaluation") {
  const Grid g(0.1);
  const auto n = static_cast<Eigen::Index>(g.ps.size());
  Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 2.5);
  Eigen::VectorXd f(n);
  for (Eigen::Index k = 0; k < n; ++k) f(k) = std::sin(g.ps.nodes[static_cast<std::size_t>(k)].phi);
  for (std::size_t k : {std::size_t{0}, std::size_t{17}, g.ps.size() - 1}) {
    CHECK(g.interp.evaluate(c, g.ps.nodes[k].point(), Operator::Identity) == doctest::Approx(2.5));
    CHECK(g.interp.evaluate(f, g.ps.nodes[k].point(), Operator::Identity) ==
          doctest::Approx(f(static_cast<Eigen::Index>(k))));
  }
  const double tol = 2 * max_dphi_error(g);
  for (const Point2 q : {Point2{0.33, 1.07}, Point2{1.21, 2.52}, Point2{0.77, 0.41}}) {
    CHECK(std::abs(g.interp.evaluate(f, q, Operator::Dphi) - std::cos(q.y)) < tol);
    const FieldJet j = g.interp.evaluate_jet(f, q);
    CHECK(j.dphi == doctest::Approx(g.interp.evaluate(f, q, Operator::Dphi)));
    CHECK(std::abs(j.dxi) < tol);
  }
}
