// Dense factorizations used by the elimination and the nonlinear solver,
// plus a cache-friendly sparse x dense product.

#ifndef RBFPU_DENSE_HPP
#define RBFPU_DENSE_HPP

#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>
#include <Eigen/QR>

#include "rbfpu/rbf.hpp"

namespace rbfpu {

class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// LU with partial pivoting. Throws SingularMatrixError on a zero pivot.
class DenseLu {
public:
  explicit DenseLu(const Eigen::MatrixXd& a);

  Eigen::Index size() const noexcept { return lu_.rows(); }
  /// Solves A x = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// 1-norm reciprocal condition estimate.
  double rcond() const;

private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Column-pivoted Householder QR, A P = Q R.
class PivotedQr {
public:
  explicit PivotedQr(const Eigen::MatrixXd& a);

  Eigen::Index rows() const noexcept { return qr_.rows(); }
  Eigen::Index cols() const noexcept { return qr_.cols(); }

  /// Zero-based column permutation: column k of A P is column perm()[k] of A.
  const std::vector<int>& perm() const noexcept { return perm_; }
  Eigen::MatrixXd matrix_r() const;
  Eigen::VectorXd r_diagonal() const;
  /// Number of |R_kk| above rel_tol * |R_00|.
  Eigen::Index rank(double rel_tol) const;

  /// Q c, in place; c has rows() rows.
  void apply_q(Eigen::MatrixXd& c) const;
  /// Columns [first, first + count) of Q.
  Eigen::MatrixXd q_columns(Eigen::Index first, Eigen::Index count) const;
  /// Solves R^T w = b for the leading square block.
  Eigen::VectorXd solve_r_transpose(const Eigen::VectorXd& b) const;

private:
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
  std::vector<int> perm_;
};

/// S * D with D dense column-major; blocked over column panels of D.
Eigen::MatrixXd sparse_times_dense(const SparseMatrix& s, const Eigen::MatrixXd& d);

}  // namespace rbfpu

#endif  // RBFPU_DENSE_HPP
