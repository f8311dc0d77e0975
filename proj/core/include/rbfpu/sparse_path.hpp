// Alternative nonlinear system that keeps the full nodal state: Dirichlet
// values are substituted directly, the remaining boundary and continuity rows
// stay in the system next to the momentum rows, and the Jacobian is sparse.

#ifndef RBFPU_SPARSE_PATH_HPP
#define RBFPU_SPARSE_PATH_HPP

#include <memory>
#include <vector>

#include "rbfpu/system.hpp"

namespace rbfpu {

class SparseSystem {
public:
  explicit SparseSystem(std::shared_ptr<const Discretization> disc);

  const Discretization& disc() const noexcept { return *disc_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(retained_cols_.size()); }
  /// Indices into X of the unknowns kept in the system, increasing.
  const std::vector<int>& retained() const noexcept { return retained_cols_; }

  /// Full X from the kept unknowns, with the Dirichlet values filled in.
  Eigen::VectorXd state(const Eigen::VectorXd& xr) const;
  /// The kept unknowns of a full X.
  Eigen::VectorXd restrict(const Eigen::VectorXd& x) const;

  /// Kept linear rows, then W1 and W2 at interior nodes.
  Eigen::VectorXd residual(const Eigen::VectorXd& xr, double re) const;
  SparseMatrix jacobian(const Eigen::VectorXd& xr, double re) const;

private:
  std::shared_ptr<const Discretization> disc_;
  SparseMatrix lin_rows_;  // kept rows of LIN, all columns
  Eigen::VectorXd g_rows_;
  SparseMatrix lin_reduced_;  // kept rows and kept columns
  std::vector<int> retained_cols_;
  Eigen::VectorXd dirichlet_;  // full-length X holding only the Dirichlet values
};

/// [LIN'] over dE/dX restricted to the kept columns, at the full state X.
SparseMatrix sparse_jacobian_alternative(const FlowProblem& problem, const Eigen::VectorXd& x);

/// Nonzero fraction nnz / n^2.
double sparsity_ratio(const SparseMatrix& a);

}  // namespace rbfpu

#endif  // RBFPU_SPARSE_PATH_HPP
