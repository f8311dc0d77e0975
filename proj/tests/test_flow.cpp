#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "checks.hpp"
#include "doctest.h"
#include "rbfpu/flow.hpp"

using namespace rbfpu;

namespace {

struct Solved {
  std::shared_ptr<const Discretization> disc;
  std::shared_ptr<const ReducedSystem> sys;
  std::vector<FlowSolution> stages;  // Re = 1, 2, 20
  double e0 = 0.0;                   // |E(0)| at Re = 2
  double e_final = 0.0;              // |E| at the Re = 2 solution
};

const Solved& solved() {
  static const Solved s = [] {
    Solved out;
    out.disc = checks::circle(0.1);
    out.sys = std::make_shared<const ReducedSystem>(out.disc);
    auto sys = out.sys;
    auto factory = [sys](double re) {
      NonlinearSystem ns;
      ns.dim = sys->dim();
      ns.residual = [sys, re](const Eigen::VectorXd& y) { return sys->residual(y, re); };
      ns.jacobian = [sys, re](const Eigen::VectorXd& y) -> std::unique_ptr<Linearization> {
        return std::make_unique<DenseLinearization>(sys->jacobian(y, re));
      };
      return ns;
    };
    const ContinuationReport r = continuation(factory, {1.0, 2.0, 20.0});
    if (!r.converged) throw std::runtime_error("continuation failed: " + r.failure);
    for (const StageReport& st : r.stages) out.stages.push_back({out.disc, sys->state(st.report.y_final), st.re});
    out.e0 = sys->residual(Eigen::VectorXd::Zero(sys->dim()), 2.0).norm();
    out.e_final = sys->residual(r.stages[1].report.y_final, 2.0).norm();
    return out;
  }();
  return s;
}

FlowSolution synthetic(const std::shared_ptr<const Discretization>& d) {
  const Pointset& ps = d->pointset();
  const auto n = static_cast<Eigen::Index>(ps.size());
  FlowSolution s{d, Eigen::VectorXd::Zero(3 * n), 5.0};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Node& nd = ps.nodes[static_cast<std::size_t>(k)];
    s.x(k) = std::cos(nd.phi) * (1.0 - 0.3 * (2.0 - nd.xi) * (2.0 - nd.xi) / 4.0);
    s.x(n + k) = -std::sin(nd.phi) * (1.0 + 0.2 * nd.xi * (2.0 - nd.xi));
    s.x(2 * n + k) = 0.1 * std::cos(nd.phi) * (2.0 - nd.xi);
  }
  return s;
}

}  // namespace

TEST_CASE("uniform stream decomposition") {
  for (double phi : {0.0, 0.4, 1.3, 2.7, kPi}) {
    const Velocity v = physical_velocity(phi, std::cos(phi), -std::sin(phi));
    CHECK(v.u == doctest::Approx(1.0));
    CHECK(v.v == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("vorticity against a physical curl") {
  const TransformParams t{2.0};
  CHECK(vorticity(0.7, NodalJets{}, 2.0) == 0.0);
  NodalJets some;
  some.vphi = {1.0, 2.0, 3.0, 4.0, 5.0};
  some.vxi = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(vorticity(2.0, some, 2.0) == 0.0);

  std::mt19937 rng(21);
  std::uniform_real_distribution<double> uxi(0.1, 1.7), uphi(0.15, kPi - 0.15);
  using S = checks::Synthetic;
  auto vxi = [&](double xi, double phi) {
    const Point2 q = *physical_coords(xi, phi, t);
    return S::u(q.x, q.y) * std::cos(phi) + S::v(q.x, q.y) * std::sin(phi);
  };
  auto vphi = [&](double xi, double phi) {
    const Point2 q = *physical_coords(xi, phi, t);
    return -S::u(q.x, q.y) * std::sin(phi) + S::v(q.x, q.y) * std::cos(phi);
  };
  for (int k = 0; k < 20; ++k) {
    const double xi = uxi(rng), phi = uphi(rng);
    const auto a = checks::differentiate(vxi, xi, phi, 1e-3);
    const auto b = checks::differentiate(vphi, xi, phi, 1e-3);
    NodalJets j;
    j.vxi = {vxi(xi, phi), a.d1, a.d2, a.d11, a.d22};
    j.vphi = {vphi(xi, phi), b.d1, b.d2, b.d11, b.d22};
    const Point2 q = *physical_coords(xi, phi, t);
    const double h = 1e-4;
    const double curl = (S::v(q.x + h, q.y) - S::v(q.x - h, q.y)) / (2 * h) - (S::u(q.x, q.y + h) - S::u(q.x, q.y - h)) / (2 * h);
    CHECK(vorticity(xi, j, t.ell) == doctest::Approx(curl).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("zero fields have no drag") {
  const auto d = checks::circle(0.25);
  const FlowSolution z{d, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * d->n())), 10.0};
  const DragCoefficients c = drag_coefficient(z);
  CHECK(c.c_p == 0.0);
  CHECK(c.c_omega == 0.0);
  CHECK(c.c_d == 0.0);
}

TEST_CASE("surface profile layout") {
  const auto d = checks::circle(0.25);
  const FlowSolution s = synthetic(d);
  const SurfaceProfile p = surface_profiles(s);
  CHECK(p.phi.size() == d->pointset().n_cyl);
  CHECK(p.pressure.size() == p.phi.size());
  CHECK(p.omega.size() == p.phi.size());
  CHECK(std::is_sorted(p.phi.begin(), p.phi.end()));
  for (std::size_t k = 0; k < p.phi.size(); ++k) {
    CHECK(p.phi_plot[k] == doctest::Approx(kPi - p.phi[k]));
    CHECK(std::hypot(p.x[k], p.y[k]) == doctest::Approx(1.0));
  }
  const DragCoefficients c = drag_coefficient(p, s.re);
  CHECK(c.c_d == doctest::Approx(c.c_p + c.c_omega));
}

TEST_CASE("flow_coords") {
  const auto d = checks::circle(0.25);
  CHECK_FALSE(flow_coords(*d, {0.2, 0.3}).has_value());
  const auto q = flow_coords(*d, {0.0, 2.0});
  REQUIRE(q.has_value());
  CHECK(q->x == doctest::Approx(1.0));
  CHECK(q->y == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(flow_coords(*d, {0.0, -1.0}), DomainError);
}

TEST_CASE("evaluation grid") {
  const auto g = evaluation_grid();
  CHECK(g.size() == 51 * 26);
  CHECK(g.front().x == doctest::Approx(-2.0));
  CHECK(g.back().x == doctest::Approx(8.0));
  CHECK(g.back().y == doctest::Approx(5.0));
}

TEST_CASE("solved circle, h = 0.1") {
  const Solved& s = solved();
  const FlowSolution& re1 = s.stages[0];
  const FlowSolution& re20 = s.stages[2];
  const Pointset& ps = s.disc->pointset();

  SUBCASE("boundary values") {
    for (std::size_t k = ps.cyl_begin(); k < ps.cyl_begin() + ps.n_cyl; ++k) {
      const Velocity v = physical_velocity(re20, ps.nodes[k].point());
      CHECK(std::abs(v.u) < 1e-10);
      CHECK(std::abs(v.v) < 1e-10);
    }
    const Velocity far = physical_velocity(re20, {2.0, 1.0});
    CHECK(far.u == 1.0);
    CHECK(far.v == 0.0);
    CHECK(vorticity(re20, {2.0, 1.0}) == 0.0);
    CHECK(max_collocated_continuity(re20) < 1e-9);
  }

  SUBCASE("nodal residual drops") { CHECK(s.e0 > 1e4 * s.e_final); }

  SUBCASE("no wake at Re = 1") {
    const WakeResult w = wake_length(re1);
    CHECK(w.length == 0.0);
    CHECK(w.x_end == 1.0);
    CHECK_THROWS(eddy_centre(re1, w));
  }

  SUBCASE("Re = 20") {
    const SurfaceProfile p = surface_profiles(re20);
    const auto front = std::max_element(p.pressure.begin(), p.pressure.end()) - p.pressure.begin();
    // the corner node itself carries no axis condition on p, so the peak may
    // sit one node off the stagnation point
    CHECK(p.phi_plot[static_cast<std::size_t>(front)] < 0.25);

    const FlowMetrics m = compute_metrics(re20);
    CHECK(m.drag.c_d == doctest::Approx(m.drag.c_p + m.drag.c_omega));
    CHECK(m.drag.c_p > 0.0);
    CHECK(m.drag.c_omega > 0.0);
    CHECK(m.wake_length > 0.0);
    REQUIRE(m.eddy.has_value());
    CHECK(m.eddy->x > 0.0);
    CHECK(m.eddy->y > 0.0);
    // the eddy centre is a stagnation point of the flow
    const Point2 centre{rear_stagnation_x(s.disc->shape()) + 2.0 * m.eddy->x, m.eddy->y};
    const Velocity v = physical_velocity(re20, *flow_coords(*s.disc, centre));
    CHECK(std::hypot(v.u, v.v) < 1e-8);

    const ResidualReport r = residual_report(re20);
    CHECK(r.samples > 1000);
    for (const auto& e : r.eq) CHECK(e.rms <= e.max);
  }
}
