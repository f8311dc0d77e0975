// Post-processing of a solved state: velocity and vorticity anywhere in the
// flow, surface profiles, drag, recirculation bubble and residual sampling.
//
// Lengths are physical (cylinder radius 1) unless stated otherwise; the
// reported wake length and eddy centre are in diameters.

#ifndef RBFPU_FLOW_HPP
#define RBFPU_FLOW_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbfpu/system.hpp"

namespace rbfpu {

/// A nodal state on a discretization, at a given Reynolds number.
struct FlowSolution {
  std::shared_ptr<const Discretization> disc;
  Eigen::VectorXd x;  // (v_xi, v_phi, p), 3N
  double re = 1.0;

  Eigen::VectorXd field(Field f) const;
  void validate() const;
};

struct Velocity {
  double u = 0.0;
  double v = 0.0;
};

/// (xi, phi) of a physical point, or nullopt strictly inside the obstacle.
std::optional<Point2> flow_coords(const Discretization& disc, Point2 physical);

/// All three fields and their partials at a transformed point.
NodalJets evaluate_jets(const FlowSolution& sol, Point2 q);

/// Cartesian velocity at a transformed point; (1, 0) at xi = ell.
Velocity physical_velocity(const FlowSolution& sol, Point2 q);
Velocity physical_velocity(double phi, double v_xi, double v_phi);

/// Signed vorticity at a transformed point.
double vorticity(const FlowSolution& sol, Point2 q);
double vorticity(double xi, const NodalJets& j, double ell);

struct SurfaceProfile {
  std::vector<double> phi;       // polar angle of the surface node, increasing
  std::vector<double> phi_plot;  // pi - phi: 0 at the front stagnation point
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> pressure;  // 2 p, i.e. (P - P_inf) / (rho U^2 / 2)
  std::vector<double> omega;
};

SurfaceProfile surface_profiles(const FlowSolution& sol);

struct DragCoefficients {
  double c_p = 0.0;
  double c_omega = 0.0;
  double c_d = 0.0;
};

/// Trapezoidal line integrals over the surface nodes.
DragCoefficients drag_coefficient(const SurfaceProfile& s, double re);
DragCoefficients drag_coefficient(const FlowSolution& sol);

/// x of the rear stagnation point on the downstream axis.
double rear_stagnation_x(const ObstacleShape& shape);

struct WakeResult {
  double length = 0.0;  // diameters
  double x_end = 0.0;   // physical abscissa where u changes sign
  std::vector<std::string> warnings;
};

WakeResult wake_length(const FlowSolution& sol);

/// Eddy centre (a, b): a is the streamwise distance from the rear stagnation
/// point in diameters, b the spacing of the two symmetric eddies in diameters.
/// Throws std::runtime_error if the search leaves the bubble region.
Point2 eddy_centre(const FlowSolution& sol, const WakeResult& wake);

struct ResidualStats {
  double rms = 0.0;
  double max = 0.0;
};

struct ResidualReport {
  std::array<ResidualStats, 3> eq;  // W1, W2, W3
  std::size_t samples = 0;
};

/// The physical sampling grid [-2:0.2:8] x [0:0.2:5].
std::vector<Point2> evaluation_grid();

ResidualReport residual_report(const FlowSolution& sol);

/// W3 at the nodes where it is collocated (interior and cylinder).
double max_collocated_continuity(const FlowSolution& sol);

struct FlowMetrics {
  DragCoefficients drag;
  double wake_length = 0.0;
  std::optional<Point2> eddy;
  std::vector<std::string> warnings;
};

FlowMetrics compute_metrics(const FlowSolution& sol);

}  // namespace rbfpu

#endif  // RBFPU_FLOW_HPP
