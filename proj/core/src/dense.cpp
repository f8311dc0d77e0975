#include "rbfpu/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rbfpu {

DenseLu::DenseLu(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("DenseLu: matrix must be square");
  lu_.compute(a);
  const Eigen::VectorXd d = lu_.matrixLU().diagonal();
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d(k) == 0.0 || !std::isfinite(d(k))) {
      throw SingularMatrixError("LU: zero or non-finite pivot at column " + std::to_string(k));
    }
  }
}

Eigen::VectorXd DenseLu::solve(const Eigen::VectorXd& b) const {
  if (size() == 0) return b;
  return lu_.solve(b);
}

double DenseLu::rcond() const { return size() == 0 ? 1.0 : lu_.rcond(); }

PivotedQr::PivotedQr(const Eigen::MatrixXd& a) {
  if (a.rows() < a.cols()) throw std::invalid_argument("PivotedQr: needs rows >= cols");
  qr_.compute(a);
  const auto& idx = qr_.colsPermutation().indices();
  perm_.assign(idx.data(), idx.data() + idx.size());
}

Eigen::MatrixXd PivotedQr::matrix_r() const {
  return qr_.matrixQR().topRows(cols()).triangularView<Eigen::Upper>();
}

Eigen::VectorXd PivotedQr::r_diagonal() const { return qr_.matrixQR().topRows(cols()).diagonal(); }

Eigen::Index PivotedQr::rank(double rel_tol) const {
  const Eigen::Index n = cols();
  if (n == 0) return 0;
  const double lead = std::abs(qr_.matrixQR()(0, 0));
  Eigen::Index r = 0;
  while (r < n && std::abs(qr_.matrixQR()(r, r)) > rel_tol * lead) ++r;
  return r;
}

void PivotedQr::apply_q(Eigen::MatrixXd& c) const {
  if (c.rows() != rows()) throw std::invalid_argument("apply_q: row mismatch");
  if (cols() == 0 || c.cols() == 0) return;
  c.applyOnTheLeft(qr_.householderQ());
}

Eigen::MatrixXd PivotedQr::q_columns(Eigen::Index first, Eigen::Index count) const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows(), count);
  for (Eigen::Index j = 0; j < count; ++j) c(first + j, j) = 1.0;
  apply_q(c);
  return c;
}

Eigen::VectorXd PivotedQr::solve_r_transpose(const Eigen::VectorXd& b) const {
  return qr_.matrixQR().topRows(cols()).triangularView<Eigen::Upper>().transpose().solve(b);
}

Eigen::MatrixXd sparse_times_dense(const SparseMatrix& s, const Eigen::MatrixXd& d) {
  if (s.cols() != d.rows()) throw std::invalid_argument("sparse_times_dense: shape mismatch");
  constexpr Eigen::Index kPanel = 16;
  using Panel = Eigen::Matrix<double, Eigen::Dynamic, kPanel, Eigen::RowMajor>;
  using Row = Eigen::Matrix<double, 1, kPanel>;
  const Eigen::Index rows = s.rows();
  const Eigen::Index cols = d.cols();
  Eigen::MatrixXd out(rows, cols);
  Panel panel(d.rows(), kPanel);
  Panel acc(rows, kPanel);
  for (Eigen::Index c0 = 0; c0 < cols; c0 += kPanel) {
    const Eigen::Index w = std::min(kPanel, cols - c0);
    panel.setZero();
    panel.leftCols(w) = d.middleCols(c0, w);
    for (Eigen::Index i = 0; i < rows; ++i) {
      Row sum = Row::Zero();
      for (SparseMatrix::InnerIterator it(s, i); it; ++it) sum.noalias() += it.value() * panel.row(it.col());
      acc.row(i) = sum;
    }
    out.middleCols(c0, w) = acc.leftCols(w);
  }
  return out;
}

}  // namespace rbfpu
