#include <cmath>

#include "checks.hpp"
#include "doctest.h"
#include "rbfpu/ordering.hpp"
#include "rbfpu/sparse_path.hpp"

using namespace rbfpu;

namespace {

std::shared_ptr<const Discretization> grid(double h, double rho) {
  DiscretizationParams p;
  p.h = h;
  p.patch_radius = rho;
  return std::make_shared<const Discretization>(p);
}

NonlinearSystem sparse_family(std::shared_ptr<const SparseSystem> s, double re) {
  NonlinearSystem ns;
  ns.dim = s->dim();
  ns.residual = [s, re](const Eigen::VectorXd& x) { return s->residual(x, re); };
  ns.jacobian = [s, re](const Eigen::VectorXd& x) -> std::unique_ptr<Linearization> {
    return std::make_unique<SparseLinearization>(SparseLinearization::Matrix(s->jacobian(x, re)));
  };
  return ns;
}

}  // namespace

TEST_CASE("sparse system is square and keeps the boundary values") {
  const auto d = grid(0.25, 0.25);
  const SparseSystem s(d);
  const Eigen::VectorXd xr = Eigen::VectorXd::Random(s.dim());
  CHECK(s.residual(xr, 2.0).size() == s.dim());
  const SparseMatrix j = s.jacobian(xr, 2.0);
  CHECK(j.rows() == s.dim());
  CHECK(j.cols() == s.dim());
  CHECK((s.restrict(s.state(xr)) - xr).cwiseAbs().maxCoeff() == 0.0);

  const Pointset& ps = d->pointset();
  const auto n = static_cast<Eigen::Index>(ps.size());
  const Eigen::VectorXd x = s.state(xr);
  for (std::size_t k = ps.far_begin(); k < ps.far_begin() + ps.n_far; ++k) {
    CHECK(x(static_cast<Eigen::Index>(k)) == doctest::Approx(std::cos(ps.nodes[k].phi)));
    CHECK(x(n + static_cast<Eigen::Index>(k)) == doctest::Approx(-std::sin(ps.nodes[k].phi)));
  }
  for (std::size_t k = ps.cyl_begin(); k < ps.cyl_begin() + ps.n_cyl; ++k) {
    CHECK(x(static_cast<Eigen::Index>(k)) == 0.0);
  }

  const SparseMatrix alt = sparse_jacobian_alternative(FlowProblem{2.0, d}, x);
  CHECK((Eigen::MatrixXd(alt) - Eigen::MatrixXd(j)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sparse Jacobian against central differences") {
  const SparseSystem s(grid(0.25, 0.25));
  const Eigen::VectorXd x = Eigen::VectorXd::Random(s.dim());
  const Eigen::MatrixXd j = Eigen::MatrixXd(s.jacobian(x, 20.0));
  const double d = 1e-6;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += d;
    xm(c) -= d;
    worst = std::max(worst, ((s.residual(xp, 20.0) - s.residual(xm, 20.0)) / (2 * d) - j.col(c)).cwiseAbs().maxCoeff());
  }
  CHECK(worst / j.cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("nonzero fraction grows with the patch radius") {
  double last = 0.0;
  for (double rho : {0.2, 0.25, 0.35}) {
    const SparseSystem s(grid(0.1, rho));
    const double r = sparsity_ratio(s.jacobian(Eigen::VectorXd::Zero(s.dim()), 1.0));
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("RCM does not widen the Jacobian band") {
  const SparseSystem s(grid(0.1, 0.25));
  const SparseMatrix j = s.jacobian(Eigen::VectorXd::Zero(s.dim()), 1.0);
  const SparseMatrix b = permute_symmetric(j, reverse_cuthill_mckee(j));
  CHECK(bandwidth(b) <= bandwidth(j));
}

TEST_CASE("sparse and reduced formulations reach the same flow") {
  // coarser grids have no discrete solution near the start
  const auto d = grid(0.1, 0.25);
  const auto sparse = std::make_shared<const SparseSystem>(d);
  const auto reduced = std::make_shared<const ReducedSystem>(d);
  const double re = 1.0;

  TrustRegionConfig cfg;
  const NonlinearSystem a = sparse_family(sparse, re);
  const SolveReport ra = solve(a.residual, a.jacobian, sparse->restrict(reduced->state(Eigen::VectorXd::Zero(reduced->dim()))), cfg);
  const SolveReport rb = solve([&](const Eigen::VectorXd& y) { return reduced->residual(y, re); },
                               [&](const Eigen::VectorXd& y) -> std::unique_ptr<Linearization> {
                                 return std::make_unique<DenseLinearization>(reduced->jacobian(y, re));
                               },
                               Eigen::VectorXd::Zero(reduced->dim()), cfg);
  REQUIRE(ra.converged);
  REQUIRE(rb.converged);
  const Eigen::VectorXd xa = sparse->state(ra.y_final);
  const Eigen::VectorXd xb = reduced->state(rb.y_final);
  const auto n = static_cast<Eigen::Index>(d->n());
  const auto ni = static_cast<Eigen::Index>(d->n_interior());
  double worst = 0.0;
  for (int f = 0; f < 3; ++f) worst = std::max(worst, (xa.segment(f * n, ni) - xb.segment(f * n, ni)).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-6);
}
