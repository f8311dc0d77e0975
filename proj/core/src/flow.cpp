#include "rbfpu/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rbfpu {

Eigen::VectorXd FlowSolution::field(Field f) const {
  const auto n = static_cast<Eigen::Index>(disc->n());
  return x.segment(static_cast<Eigen::Index>(f) * n, n);
}

void FlowSolution::validate() const {
  if (!disc) throw DomainError("flow solution has no discretization");
  if (x.size() != 3 * static_cast<Eigen::Index>(disc->n())) throw DomainError("state vector must have length 3N");
  if (!(re > 0.0)) throw DomainError("Reynolds number must be > 0");
}

std::optional<Point2> flow_coords(const Discretization& disc, Point2 physical) {
  if (physical.y < 0.0) throw DomainError("flow_coords: the domain is the upper half plane");
  const double r = std::hypot(physical.x, physical.y);
  const double phi = std::atan2(physical.y, physical.x);
  if (r < boundary_radius(disc.shape(), phi) * (1.0 - 1e-12)) return std::nullopt;
  Point2 q = transformed_coords(physical, disc.transform());
  // round-off can place surface points a hair inside
  q.x = std::max(q.x, boundary_curve(disc.shape(), q.y, disc.transform()));
  return q;
}

NodalJets evaluate_jets(const FlowSolution& sol, Point2 q) {
  const PointStencil st = sol.disc->interpolator().stencil(q);
  const auto n = static_cast<Eigen::Index>(sol.disc->n());
  NodalJets out;
  FieldJet* fields[3] = {&out.vxi, &out.vphi, &out.p};
  for (Eigen::Index f = 0; f < 3; ++f) {
    std::array<double, 5> a{};
    for (std::size_t k = 0; k < st.nodes.size(); ++k) {
      const double val = sol.x(f * n + static_cast<Eigen::Index>(st.nodes[k]));
      for (Eigen::Index op = 0; op < 5; ++op) a[static_cast<std::size_t>(op)] += st.coeff(static_cast<Eigen::Index>(k), op) * val;
    }
    *fields[f] = FieldJet::from(a);
  }
  return out;
}

Velocity physical_velocity(double phi, double v_xi, double v_phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {v_xi * c - v_phi * s, v_xi * s + v_phi * c};
}

Velocity physical_velocity(const FlowSolution& sol, Point2 q) {
  if (q.x >= sol.disc->transform().ell) return {1.0, 0.0};
  const NodalJets j = evaluate_jets(sol, q);
  return physical_velocity(q.y, j.vxi.value, j.vphi.value);
}

double vorticity(double xi, const NodalJets& j, double ell) {
  const double s = ell - xi;
  return s / ell * (s * j.vphi.dxi - j.vxi.dphi + j.vphi.value);
}

double vorticity(const FlowSolution& sol, Point2 q) {
  const double ell = sol.disc->transform().ell;
  if (q.x >= ell) return 0.0;
  return vorticity(q.x, evaluate_jets(sol, q), ell);
}

SurfaceProfile surface_profiles(const FlowSolution& sol) {
  sol.validate();
  const Discretization& d = *sol.disc;
  const Pointset& ps = d.pointset();
  const double ell = d.transform().ell;
  const auto n = static_cast<Eigen::Index>(d.n());
  const Eigen::VectorXd vxi = sol.field(Field::Vxi);
  const Eigen::VectorXd vphi = sol.field(Field::Vphi);

  std::vector<std::size_t> idx(ps.n_cyl);
  std::iota(idx.begin(), idx.end(), ps.cyl_begin());
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ps.nodes[a].phi < ps.nodes[b].phi; });

  SurfaceProfile s;
  for (std::size_t k : idx) {
    const auto row = static_cast<Eigen::Index>(k);
    const Node& nd = ps.nodes[k];
    NodalJets j;
    j.vxi.value = vxi(row);
    j.vphi.value = vphi(row);
    j.vxi.dphi = d.ops().dphi.row(row).dot(vxi);
    j.vphi.dxi = d.ops().dxi.row(row).dot(vphi);
    const Point2 xy = *physical_coords(nd.xi, nd.phi, d.transform());
    s.phi.push_back(nd.phi);
    s.phi_plot.push_back(kPi - nd.phi);
    s.x.push_back(xy.x);
    s.y.push_back(xy.y);
    s.pressure.push_back(2.0 * sol.x(2 * n + row));
    s.omega.push_back(vorticity(nd.xi, j, ell));
  }
  return s;
}

DragCoefficients drag_coefficient(const SurfaceProfile& s, double re) {
  if (!(re > 0.0)) throw DomainError("drag: Reynolds number must be > 0");
  // along the upper surface from the rear (phi = 0) to the front (phi = pi):
  // n_x ds = dy and tau_x ds = dx
  DragCoefficients c;
  double ip = 0.0;
  double iw = 0.0;
  for (std::size_t k = 0; k + 1 < s.phi.size(); ++k) {
    const double dx = s.x[k + 1] - s.x[k];
    const double dy = s.y[k + 1] - s.y[k];
    ip += 0.5 * (s.pressure[k] + s.pressure[k + 1]) * dy;
    iw += 0.5 * (s.omega[k] + s.omega[k + 1]) * dx;
  }
  c.c_p = -ip;
  c.c_omega = 4.0 / re * iw;
  c.c_d = c.c_p + c.c_omega;
  return c;
}

DragCoefficients drag_coefficient(const FlowSolution& sol) { return drag_coefficient(surface_profiles(sol), sol.re); }

double rear_stagnation_x(const ObstacleShape& shape) { return boundary_radius(shape, 0.0); }

namespace {

double axis_u(const FlowSolution& sol, double x) {
  const auto q = flow_coords(*sol.disc, {x, 0.0});
  if (!q) throw DomainError("axis point inside the obstacle");
  return physical_velocity(sol, *q).u;
}

}  // namespace

WakeResult wake_length(const FlowSolution& sol) {
  sol.validate();
  const Discretization& d = *sol.disc;
  const double ell = d.transform().ell;
  const double x_rear = rear_stagnation_x(d.shape());
  const double xi_rear = compress_radius(x_rear, d.transform());

  // scan uniformly in xi, which resolves the near wake finely
  const int samples = 2000;
  std::vector<std::pair<double, double>> roots;  // bracketing x values
  double x_prev = 0.0;
  double u_prev = 0.0;
  bool have_prev = false;
  for (int k = 1; k < samples; ++k) {
    const double xi = xi_rear + (ell - xi_rear) * k / samples;
    const double x = *decompress_radius(xi, d.transform());
    const double u = axis_u(sol, x);
    if (have_prev && u_prev < 0.0 && u >= 0.0) roots.emplace_back(x_prev, x);
    x_prev = x;
    u_prev = u;
    have_prev = true;
  }

  WakeResult w;
  w.x_end = x_rear;
  if (roots.empty()) return w;
  if (roots.size() > 1) {
    std::ostringstream os;
    os << roots.size() << " sign changes of u on the wake axis; using the furthest downstream";
    w.warnings.push_back(os.str());
  }
  double lo = roots.back().first;
  double hi = roots.back().second;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    if (axis_u(sol, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  w.x_end = 0.5 * (lo + hi);

  // reversed flow that ends before the first axis node behind the body is
  // below the resolution of the node set
  const Pointset& ps = d.pointset();
  double xi_first = ell;
  for (std::size_t k = ps.axis_begin(); k < ps.axis_begin() + ps.n_axis; ++k) {
    const Node& nd = ps.nodes[k];
    if (nd.phi < 0.5 * kPi && nd.xi > xi_rear) xi_first = std::min(xi_first, nd.xi);
  }
  if (compress_radius(w.x_end, d.transform()) < xi_first) {
    std::ostringstream os;
    os << "reversed flow up to x = " << w.x_end << " lies inside the first node spacing; not counted as a wake";
    w.warnings.push_back(os.str());
    w.x_end = x_rear;
    return w;
  }
  w.length = (w.x_end - x_rear) / 2.0;
  return w;
}

Point2 eddy_centre(const FlowSolution& sol, const WakeResult& wake) {
  if (!(wake.length > 0.0)) throw std::runtime_error("eddy centre: no recirculation bubble");
  const Discretization& d = *sol.disc;
  const double x_rear = rear_stagnation_x(d.shape());
  const double x_lo = x_rear;
  const double x_hi = x_rear + 3.0 * wake.length;
  const double y_hi = 2.0;

  auto in_box = [&](Point2 p) { return p.x >= x_lo && p.x <= x_hi && p.y > 0.0 && p.y <= y_hi; };
  // mirror image below the axis: u is even in y, v odd
  auto velocity = [&](Point2 p) -> Eigen::Vector2d {
    const double sign = p.y < 0.0 ? -1.0 : 1.0;
    const auto q = flow_coords(d, {p.x, sign * p.y});
    if (!q) return {std::nan(""), std::nan("")};
    const Velocity v = physical_velocity(sol, *q);
    return {v.u, sign * v.v};
  };

  Point2 p{x_rear + wake.length, 0.5};
  Eigen::Vector2d f = velocity(p);
  constexpr double kStep = 1e-6;
  for (int it = 0; it < 100; ++it) {
    if (f.norm() < 1e-12) break;
    Eigen::Matrix2d jac;
    jac.col(0) = (velocity({p.x + kStep, p.y}) - velocity({p.x - kStep, p.y})) / (2 * kStep);
    jac.col(1) = (velocity({p.x, p.y + kStep}) - velocity({p.x, p.y - kStep})) / (2 * kStep);
    const Eigen::Vector2d step = -jac.partialPivLu().solve(f);
    if (!step.allFinite()) throw std::runtime_error("eddy centre: singular velocity Jacobian");
    double t = 1.0;
    bool moved = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      const Point2 trial{p.x + t * step.x(), p.y + t * step.y()};
      if (!in_box(trial)) continue;
      const Eigen::Vector2d ft = velocity(trial);
      if (ft.allFinite() && ft.norm() < f.norm()) {
        p = trial;
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved || t * step.norm() < 1e-12) break;
  }
  if (!in_box(p) || !(f.norm() < 1e-8)) {
    std::ostringstream os;
    os << "eddy centre: Newton search did not converge inside the bubble (|u| = " << f.norm() << ")";
    throw std::runtime_error(os.str());
  }
  return {(p.x - x_rear) / 2.0, p.y};
}

std::vector<Point2> evaluation_grid() {
  std::vector<Point2> g;
  for (int j = 0; j <= 25; ++j) {
    for (int i = 0; i <= 50; ++i) g.push_back({-2.0 + 0.2 * i, 0.2 * j});
  }
  return g;
}

ResidualReport residual_report(const FlowSolution& sol) {
  sol.validate();
  const double ell = sol.disc->transform().ell;
  ResidualReport rep;
  std::array<double, 3> sumsq{};
  for (const Point2& p : evaluation_grid()) {
    const auto q = flow_coords(*sol.disc, p);
    if (!q) continue;
    const auto w = pointwise_residual(q->x, evaluate_jets(sol, *q), sol.re, ell);
    for (std::size_t e = 0; e < 3; ++e) {
      sumsq[e] += w[e] * w[e];
      rep.eq[e].max = std::max(rep.eq[e].max, std::abs(w[e]));
    }
    ++rep.samples;
  }
  for (std::size_t e = 0; e < 3; ++e) {
    rep.eq[e].rms = rep.samples ? std::sqrt(sumsq[e] / static_cast<double>(rep.samples)) : 0.0;
  }
  return rep;
}

double max_collocated_continuity(const FlowSolution& sol) {
  sol.validate();
  const Discretization& d = *sol.disc;
  const Pointset& ps = d.pointset();
  const double ell = d.transform().ell;
  const Eigen::VectorXd vxi = sol.field(Field::Vxi);
  const Eigen::VectorXd vphi = sol.field(Field::Vphi);
  const Eigen::VectorXd dxi = d.ops().dxi * vxi;
  const Eigen::VectorXd dphi = d.ops().dphi * vphi;
  double worst = 0.0;
  auto visit = [&](std::size_t k) {
    const auto r = static_cast<Eigen::Index>(k);
    worst = std::max(worst, std::abs((ell - ps.nodes[k].xi) * dxi(r) + dphi(r) + vxi(r)));
  };
  for (std::size_t k = 0; k < ps.n_interior; ++k) visit(k);
  for (std::size_t k = ps.cyl_begin(); k < ps.cyl_begin() + ps.n_cyl; ++k) visit(k);
  return worst;
}

FlowMetrics compute_metrics(const FlowSolution& sol) {
  FlowMetrics m;
  m.drag = drag_coefficient(sol);
  const WakeResult w = wake_length(sol);
  m.wake_length = w.length;
  m.warnings = w.warnings;
  if (w.length > 0.0) {
    try {
      m.eddy = eddy_centre(sol, w);
    } catch (const std::runtime_error& e) {
      m.warnings.push_back(e.what());
    }
  }
  return m;
}

}  // namespace rbfpu
