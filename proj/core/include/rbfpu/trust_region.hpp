// Dogleg trust-region solver for square nonlinear systems E(y) = 0 and a
// continuation driver over an increasing parameter schedule.

#ifndef RBFPU_TRUST_REGION_HPP
#define RBFPU_TRUST_REGION_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rbfpu/dense.hpp"

namespace rbfpu {

struct TrustRegionConfig {
  double delta0 = 1.0;
  double delta_max = 100.0;
  double eta_accept = 1e-3;
  double shrink = 0.25;
  double grow = 2.0;
  double tol_residual = 1e-8;  // on the max norm of E
  double tol_step = 1e-12;
  int max_iters = 100;

  void validate() const;
};

/// The Jacobian at one iterate, factorized once and reused for every trial
/// step until a step is accepted.
class Linearization {
public:
  virtual ~Linearization() = default;
  virtual Eigen::Index size() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& v) const = 0;
  virtual Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const = 0;
  /// J x = b. Throws SingularMatrixError.
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& b) const = 0;
};

class DenseLinearization final : public Linearization {
public:
  explicit DenseLinearization(Eigen::MatrixXd j);

  Eigen::Index size() const override { return j_.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const override { return j_ * v; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const override { return j_.transpose() * v; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const override;
  double rcond() const { return lu_.rcond(); }
  const Eigen::MatrixXd& matrix() const noexcept { return j_; }

private:
  Eigen::MatrixXd j_;
  DenseLu lu_;
};

class SparseLinearization final : public Linearization {
public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  explicit SparseLinearization(Matrix j);

  Eigen::Index size() const override { return j_.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const override { return j_ * v; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const override { return j_.transpose() * v; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const override;

private:
  Matrix j_;
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu_;
};

enum class StepKind { Zero, GaussNewton, Dogleg, SteepestDescent };

const char* to_string(StepKind k) noexcept;

struct DoglegStep {
  Eigen::VectorXd step;
  StepKind kind = StepKind::Zero;
  /// 1/2 |E|^2 - 1/2 |E + J p|^2, the decrease predicted by the linear model.
  double predicted_reduction = 0.0;
};

DoglegStep dogleg_step(const Linearization& j, const Eigen::VectorXd& e, double delta);
DoglegStep dogleg_step(const Eigen::MatrixXd& j, const Eigen::VectorXd& e, double delta);

enum class StopReason { Converged, SmallStep, MaxIterations };

const char* to_string(StopReason r) noexcept;

struct IterationRecord {
  int iteration = 0;
  double merit = 0.0;         // after the iteration
  double residual_inf = 0.0;  // after the iteration
  double delta = 0.0;         // radius used for the step
  double step_norm = 0.0;
  double ratio = 0.0;
  bool accepted = false;
  StepKind kind = StepKind::Zero;
};

struct SolveReport {
  Eigen::VectorXd y_final;
  int iterations = 0;
  int jacobian_evaluations = 0;
  std::vector<double> merit_history;  // initial merit, then one entry per iteration
  bool converged = false;
  double final_residual_inf = 0.0;
  StopReason reason = StopReason::MaxIterations;
  std::vector<IterationRecord> log;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<std::unique_ptr<Linearization>(const Eigen::VectorXd&)>;

/// Minimizes 1/2 |E(y)|^2 from y0. Non-convergence is reported, not thrown;
/// a singular Jacobian throws SingularMatrixError.
SolveReport solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd y0,
                  const TrustRegionConfig& cfg = {});

/// One member of a parametrized family of systems.
struct NonlinearSystem {
  Eigen::Index dim = 0;
  ResidualFn residual;
  JacobianFn jacobian;
};

struct StageReport {
  double re = 0.0;
  SolveReport report;
};

struct ContinuationReport {
  std::vector<StageReport> stages;
  bool converged = false;
  std::optional<std::size_t> failed_stage;
  std::string failure;
  Eigen::VectorXd y_final;
};

/// Solves the systems of `schedule` in order, each stage starting from the
/// previous solution; the first stage starts from y0, or zero if y0 is empty.
/// Stops at the first stage that does not converge.
ContinuationReport continuation(const std::function<NonlinearSystem(double)>& factory,
                                const std::vector<double>& schedule, const TrustRegionConfig& cfg = {},
                                Eigen::VectorXd y0 = {});

/// Strictly increasing and positive; throws DomainError otherwise.
void validate_schedule(const std::vector<double>& schedule);

}  // namespace rbfpu

#endif  // RBFPU_TRUST_REGION_HPP
