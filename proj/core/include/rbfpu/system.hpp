// Collocation system for the transformed steady Navier-Stokes equations.
//
// Unknowns are X = (v_xi at all N nodes, v_phi at all N nodes, p at all N
// nodes). The boundary conditions and the continuity equation are linear and
// are eliminated with a pivoted QR of the linear block, leaving the two
// momentum equations at interior nodes as a square system in y:
//   X(y) = x_particular + O2 y.

#ifndef RBFPU_SYSTEM_HPP
#define RBFPU_SYSTEM_HPP

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbfpu/dense.hpp"
#include "rbfpu/geometry.hpp"
#include "rbfpu/pum.hpp"
#include "rbfpu/rbf.hpp"

namespace rbfpu {

enum class Field { Vxi = 0, Vphi = 1, P = 2 };

struct DiscretizationParams {
  ObstacleShape shape = ObstacleShape::circle();
  double h = 0.1;
  TransformParams transform;
  KernelParams kernel;
  double patch_radius = 0.25;
  ClusterParams cluster;

  void validate() const;
};

/// Everything that depends on geometry only: nodes, cover, local
/// interpolants and differentiation matrices. Independent of Re.
class Discretization {
public:
  explicit Discretization(const DiscretizationParams& params);
  Discretization(ObstacleShape shape, const Pointset& ps, Cover cover, TransformParams t,
                 KernelParams k);

  const ObstacleShape& shape() const noexcept { return shape_; }
  const TransformParams& transform() const noexcept { return transform_; }
  const Pointset& pointset() const noexcept { return ps_; }
  const PuInterpolator& interpolator() const noexcept { return interp_; }
  const DiffOperators& ops() const noexcept { return ops_; }
  /// The operators restricted to the leading N_I (interior) rows.
  const DiffOperators& interior_ops() const noexcept { return interior_; }

  std::size_t n() const noexcept { return ps_.size(); }
  std::size_t n_interior() const noexcept { return ps_.n_interior; }
  std::vector<std::string> warnings() const { return interp_.warnings(); }

private:
  Discretization(const DiscretizationParams& params, const Pointset& ps);

  ObstacleShape shape_;
  TransformParams transform_;
  Pointset ps_;
  PuInterpolator interp_;
  DiffOperators ops_;
  DiffOperators interior_;
};

struct FlowProblem {
  double re = 1.0;
  std::shared_ptr<const Discretization> disc;

  void validate() const;
};

/// Boundary rows stacked over the continuity rows, with right-hand side.
struct LinearBlock {
  SparseMatrix lin;
  Eigen::VectorXd g;
  std::size_t n_bc = 0;
};

LinearBlock assemble_linear_block(const Discretization& disc);

/// QR elimination of the linear block: LIN^T P = Q R.
class Reduction {
public:
  Reduction(const LinearBlock& lb, double rank_tol = 1e-12);

  const Eigen::MatrixXd& o2() const noexcept { return o2_; }
  const Eigen::VectorXd& x_particular() const noexcept { return xp_; }
  Eigen::MatrixXd o1() const;
  Eigen::MatrixXd r() const { return qr_.matrix_r(); }
  const std::vector<int>& perm() const noexcept { return qr_.perm(); }
  Eigen::Index dim() const noexcept { return o2_.cols(); }

  Eigen::VectorXd state(const Eigen::VectorXd& y) const;

private:
  PivotedQr qr_;
  Eigen::MatrixXd o2_;
  Eigen::VectorXd xp_;
};

Reduction reduce_linear(const LinearBlock& lb);

/// Value and partials of v_xi, v_phi, p at one point.
struct NodalJets {
  FieldJet vxi;
  FieldJet vphi;
  FieldJet p;
};

/// W1, W2, W3 at one point.
std::array<double, 3> pointwise_residual(double xi, const NodalJets& f, double re, double ell);

/// Partial derivative of W1 (eq 0) and W2 (eq 1) with respect to operator
/// `op` applied to field `f`: coeff[eq][f][op]. Unlisted entries are zero.
struct FrechetCoefficients {
  std::array<std::array<std::array<double, 5>, 3>, 2> coeff{};

  double operator()(int eq, Field f, Operator op) const {
    return coeff[static_cast<std::size_t>(eq)][static_cast<std::size_t>(f)][static_cast<std::size_t>(op)];
  }
};

FrechetCoefficients frechet_coefficients(double xi, const NodalJets& f, double re, double ell);

/// Jets of the nodal state at the interior nodes (value and 4 partials per field).
struct InteriorJets {
  std::array<std::array<Eigen::VectorXd, 5>, 3> d;

  NodalJets at(Eigen::Index i) const;
};

InteriorJets interior_jets(const Discretization& disc, const Eigen::VectorXd& x);

/// (W1 at interior nodes, W2 at interior nodes) for the full state X.
Eigen::VectorXd momentum_residual(const Discretization& disc, const Eigen::VectorXd& x, double re);

/// d E / d X, a 2 N_I x 3N sparse matrix.
SparseMatrix jacobian_hat(const Discretization& disc, const Eigen::VectorXd& x, double re);

/// The square nonlinear system E(y) = 0 after elimination.
class ReducedSystem {
public:
  ReducedSystem(std::shared_ptr<const Discretization> disc, std::shared_ptr<const Reduction> red);
  explicit ReducedSystem(std::shared_ptr<const Discretization> disc);

  const Discretization& disc() const noexcept { return *disc_; }
  const Reduction& reduction() const noexcept { return *red_; }
  std::shared_ptr<const Discretization> disc_ptr() const noexcept { return disc_; }
  Eigen::Index dim() const noexcept { return red_->dim(); }

  Eigen::VectorXd state(const Eigen::VectorXd& y) const { return red_->state(y); }
  Eigen::VectorXd residual(const Eigen::VectorXd& y, double re) const;
  /// J = dE/dX * O2, dense.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y, double re) const;

private:
  std::shared_ptr<const Discretization> disc_;
  std::shared_ptr<const Reduction> red_;
};

Eigen::VectorXd residual(const FlowProblem& problem, const Reduction& red, const Eigen::VectorXd& y);
Eigen::MatrixXd jacobian(const FlowProblem& problem, const Reduction& red, const Eigen::VectorXd& y);

}  // namespace rbfpu

#endif  // RBFPU_SYSTEM_HPP
