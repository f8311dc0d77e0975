#include <cmath>
#include <random>

#include "checks.hpp"
#include "doctest.h"
#include "rbfpu/system.hpp"

using namespace rbfpu;

namespace {

const std::shared_ptr<const Discretization>& tiny() {
  static const auto d = checks::circle(0.25);
  return d;
}

}  // namespace

TEST_CASE("linear block shape") {
  // h = 0.2 puts a column of nodes on phi = pi/2
  const auto grid = checks::circle(0.2);
  const Discretization& d = *grid;
  const Pointset& ps = d.pointset();
  const LinearBlock lb = assemble_linear_block(d);
  CHECK(lb.n_bc == 3 * (ps.n_far + ps.n_axis) + 2 * ps.n_cyl);
  CHECK(lb.lin.rows() == static_cast<Eigen::Index>(ps.n_interior + 3 * ps.n_boundary()));
  CHECK(lb.lin.cols() == static_cast<Eigen::Index>(3 * ps.size()));

  // far-field rows come first, one field after another
  bool seen = false;
  for (std::size_t k = 0; k < ps.n_far; ++k) {
    if (std::abs(ps.nodes[ps.far_begin() + k].phi - kPi / 2) > 1e-12) continue;
    seen = true;
    const auto r = static_cast<Eigen::Index>(k);
    const auto nf = static_cast<Eigen::Index>(ps.n_far);
    CHECK(lb.g(r) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(lb.g(nf + r) == doctest::Approx(-1.0));
    CHECK(lb.g(2 * nf + r) == 0.0);
  }
  CHECK(seen);

  PivotedQr qr(Eigen::MatrixXd(lb.lin.transpose()));
  CHECK(qr.rank(1e-12) == lb.lin.rows());
}

TEST_CASE("elimination") {
  const Discretization& d = *tiny();
  const LinearBlock lb = assemble_linear_block(d);
  const Reduction red(lb);
  CHECK(red.dim() == static_cast<Eigen::Index>(2 * d.n_interior()));

  const Eigen::MatrixXd& o2 = red.o2();
  const Eigen::MatrixXd o1 = red.o1();
  CHECK((o2.transpose() * o2 - Eigen::MatrixXd::Identity(o2.cols(), o2.cols())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((o1.transpose() * o2).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(checks::constraint_residual(lb, red, 10, 5) < 1e-10);

  // far-field values are pinned for every y
  const Pointset& ps = d.pointset();
  const auto n = static_cast<Eigen::Index>(ps.size());
  const Eigen::VectorXd x = red.state(Eigen::VectorXd::Random(red.dim()));
  for (std::size_t k = ps.far_begin(); k < ps.far_begin() + ps.n_far; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    CHECK(x(i) == doctest::Approx(std::cos(ps.nodes[k].phi)).epsilon(1e-10));
    CHECK(x(n + i) == doctest::Approx(-std::sin(ps.nodes[k].phi)).epsilon(1e-10));
    CHECK(std::abs(x(2 * n + i)) < 1e-10);
  }
}

TEST_CASE("constraint holds at h = 0.1") {
  const auto d = checks::circle(0.1);
  const LinearBlock lb = assemble_linear_block(*d);
  const Reduction red(lb);
  CHECK(checks::constraint_residual(lb, red, 10, 9) < 1e-10);
}

TEST_CASE("residual is homogeneous in the fields") {
  const Discretization& d = *tiny();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * d.n()));
  for (double re : {0.0, 1.0, 40.0}) CHECK(momentum_residual(d, zero, re).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pointwise residual against the physical equations") {
  for (double re : {0.0, 2.0, 20.0}) CHECK(checks::transformed_equation_oracle(20, re, 17) < 1e-6);
}

TEST_CASE("Frechet coefficients against differences") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double ell = 2.0, re = 7.0, d = 1e-6;
  for (int t = 0; t < 10; ++t) {
    NodalJets j;
    for (FieldJet* f : {&j.vxi, &j.vphi, &j.p}) *f = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double xi = 1.0 + u(rng);
    const FrechetCoefficients c = frechet_coefficients(xi, j, re, ell);
    for (int f = 0; f < 3; ++f) {
      for (Operator op : kAllOperators) {
        auto perturbed = [&](double delta) {
          NodalJets k = j;
          FieldJet* fields[3] = {&k.vxi, &k.vphi, &k.p};
          double* slots[5] = {&fields[f]->value, &fields[f]->dxi, &fields[f]->dphi, &fields[f]->dxixi,
                              &fields[f]->dphiphi};
          *slots[static_cast<int>(op)] += delta;
          return pointwise_residual(xi, k, re, ell);
        };
        const auto wp = perturbed(d), wm = perturbed(-d);
        for (int eq = 0; eq < 2; ++eq) {
          const double fd = (wp[eq] - wm[eq]) / (2 * d);
          CHECK(c(eq, static_cast<Field>(f), op) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("Frechet coefficients: special cases") {
  NodalJets j;
  j.vxi = {0.3, -0.2, 0.5, 1.0, 2.0};
  j.vphi = {0.1, 0.4, -0.6, 0.2, 0.7};
  j.p = {1.0, 2.0, 3.0, 4.0, 5.0};
  NodalJets k = j;
  k.vxi.value = -5.0;
  k.vphi.dphi = 9.0;
  const auto a = frechet_coefficients(0.7, j, 0.0, 2.0);
  const auto b = frechet_coefficients(0.7, k, 0.0, 2.0);
  CHECK(a.coeff == b.coeff);
  CHECK(a(0, Field::P, Operator::Dxi) == 0.0);

  const auto far = frechet_coefficients(2.0, j, 10.0, 2.0);
  CHECK(far(0, Field::Vxi, Operator::Dxixi) == 0.0);
  CHECK(far(0, Field::Vxi, Operator::Dphiphi) == 0.0);
  CHECK(far(0, Field::P, Operator::Dxi) == 0.0);
}

TEST_CASE("reduced Jacobian against central differences") {
  const ReducedSystem sys(tiny());
  for (double re : {1.0, 20.0}) CHECK(checks::jacobian_vs_fd(sys, re, 3) < 1e-5);
}

TEST_CASE("Stokes Jacobian does not depend on the state") {
  const ReducedSystem sys(tiny());
  const Eigen::MatrixXd a = sys.jacobian(Eigen::VectorXd::Random(sys.dim()), 0.0);
  const Eigen::MatrixXd b = sys.jacobian(Eigen::VectorXd::Random(sys.dim()), 0.0);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free functions agree with ReducedSystem") {
  const auto red = std::make_shared<const Reduction>(assemble_linear_block(*tiny()));
  const ReducedSystem sys(tiny(), red);
  const FlowProblem prob{3.0, tiny()};
  const Eigen::VectorXd y = Eigen::VectorXd::Random(sys.dim());
  CHECK((residual(prob, *red, y) - sys.residual(y, 3.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((jacobian(prob, *red, y) - sys.jacobian(y, 3.0)).cwiseAbs().maxCoeff() == 0.0);
}
